from datetime import date

__author__ = 'mhalvorsen <mhalvorsen@posteo.net>'
__date__ = date.fromisoformat('2026-10-17')
__credits__ = """The numpy and networkx maintainers, for the linear algebra and graph plumbing.
Everyone who sent small hand-checked transport instances for the fixture set.
"""
__version__ = '0.1.0'
