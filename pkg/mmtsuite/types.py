from typing import Tuple

Point = Tuple[float, ...]
Multiplicity = Tuple[int, ...]
Box = Tuple[int, ...]
Permutation = Tuple[int, ...]
Sigma = Tuple[Permutation, ...]
SignPattern = Tuple[int, ...]
EdgeKey = Tuple[int, int]
