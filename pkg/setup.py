import os

import setuptools


__author__, __version__ = str(), str()
exec(open(os.path.join('mmtsuite', '_metadata.py')).read())
if not __author__ and not __version__:
    raise ValueError('setup: package missing metadata')

with open('README.md') as fh:
    long_description = fh.read()

with open('requirements.txt') as fh:
    install_requires = fh.read()

setuptools.setup(
    name='mmtsuite',
    version=__version__,
    description='Discrete multi-material branched transport: costs, norms, calibrations and small exact solvers.',
    long_description=long_description,
    long_description_content_type='text/markdown',
    author=__author__.split()[0],
    author_email=__author__.split()[1][1:-1],
    license='UNLICENSE',
    install_requires=install_requires,
    extras_require={
        "Progress Bar": ['rich>=6.1.2']
    },
    classifiers=[
        "Intended Audience :: Science/Research",
        "License :: Public Domain",
        "Natural Language :: English",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3.8",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Typing :: Typed",
    ],
    keywords="branched transport steiner multi-material network calibration norm",
    packages=setuptools.find_packages(exclude=['tests']),
    package_data={
        'mmtsuite': ['py.typed']
    },
    entry_points={
        'console_scripts': ['mmtsuite = mmtsuite.cli:main'],
    },
    python_requires='>=3.8',
)
