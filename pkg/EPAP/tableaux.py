"""
Double Butcher tableaux

An IMEX Runge-Kutta scheme pairs an explicit tableau
:math:`(\\tilde{A}, \\tilde{\\omega}, \\tilde{c})` with a diagonally
implicit one :math:`(A, \\omega, c)`. Tableaux are data: the builtin
schemes live in ``presets/tableaux.yaml`` and user schemes can be read
from files with the same layout.
"""
import ast
import operator
from enum import Enum
from pathlib import Path
from typing import Dict, Union

import numpy as np
import yaml

from EPAP import config
from EPAP.params.base import BaseParameters

DEFAULT_GAMMA = 1 - np.sqrt(2)/2
"""
Default :math:`\\gamma` of the ARS(2,2,2) and DP2-A(2,4,2) tableaux.

:type: float
"""

ROW_SUM_TOL = 1e-14
"""
Tolerance of the row-sum consistency check.

:type: float
"""

BUILTIN_NAMES = ('DP1A242', 'DP2A242', 'ARS222', 'FirstOrder')
"""
The names accepted by ``builtin``.

:type: tuple of str
"""


class TableauError(ValueError):
    """
    Malformed or unknown tableau.
    """


class TableauType(Enum):
    """
    Classes of IMEX-RK tableaux.
    """
    TYPE_A = 'TypeA'
    TYPE_CK = 'TypeCK'
    OTHER = 'Other'


_OPERATORS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
}


def _evaluate(node: ast.AST, symbols: Dict[str, float]) -> float:
    if isinstance(node, ast.Expression):
        return _evaluate(node.body, symbols)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name):
        try:
            return symbols[node.id]
        except KeyError as err:
            raise TableauError(f'Unknown symbol {node.id!r}.') from err
    if isinstance(node, ast.BinOp) and type(node.op) in _OPERATORS:
        return _OPERATORS[type(node.op)](_evaluate(node.left, symbols), _evaluate(node.right, symbols))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _OPERATORS:
        return _OPERATORS[type(node.op)](_evaluate(node.operand, symbols))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == 'sqrt':
        return float(np.sqrt(_evaluate(node.args[0], symbols)))
    raise TableauError(f'Unsupported tableau entry {ast.dump(node)}.')


def parse_entry(value: Union[str, float, int], gamma: float = DEFAULT_GAMMA) -> float:
    """
    Convert one tableau entry to a float.

    Parameters
    ----------
    value : str, float or int
        A number, or an arithmetic string such as ``'1/3'`` or
        ``'1/2 - gamma'``.
    gamma : float, optional
        The value of the symbol ``gamma``.

    Returns
    -------
    float
        The entry.

    Raises
    ------
    TableauError
        If the string uses an unknown symbol or operation.
    """
    if isinstance(value, (int, float)):
        return float(value)
    sigma = 1/(2*gamma)
    symbols = {'gamma': gamma, 'sigma': sigma, 'delta': 1 - sigma}
    try:
        tree = ast.parse(str(value), mode='eval')
    except SyntaxError as err:
        raise TableauError(f'Cannot parse tableau entry {value!r}.') from err
    return _evaluate(tree, symbols)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


class DoubleButcherTableau(BaseParameters):
    """
    Paired explicit/implicit Runge-Kutta coefficients.

    Parameters
    ----------
    name : str
        Identifier of the scheme.
    a_ex : array-like
        The strictly lower triangular explicit matrix :math:`\\tilde{A}`.
    a_im : array-like
        The lower triangular implicit matrix :math:`A`.
    w_ex : array-like
        The explicit weights :math:`\\tilde{\\omega}`.
    w_im : array-like
        The implicit weights :math:`\\omega`.
    c_ex : array-like, optional
        The explicit abscissae. Default is the row sums of `a_ex`.
    c_im : array-like, optional
        The implicit abscissae. Default is the row sums of `a_im`.

    Raises
    ------
    TableauError
        If the shapes are inconsistent, the matrices have the wrong
        triangular structure, or given abscissae differ from the
        row sums by more than ``ROW_SUM_TOL``.
    """
    _PRESET_PATH = config.TABLEAU_PATH

    def __init__(
        self,
        name: str,
        a_ex,
        a_im,
        w_ex,
        w_im,
        c_ex=None,
        c_im=None
    ):
        a_ex = np.atleast_2d(np.asarray(a_ex, dtype=float))
        a_im = np.atleast_2d(np.asarray(a_im, dtype=float))
        s = a_ex.shape[0]
        if a_ex.shape != (s, s) or a_im.shape != (s, s):
            raise TableauError(f'{name}: both matrices must be {s}x{s}.')
        w_ex = np.asarray(w_ex, dtype=float)
        w_im = np.asarray(w_im, dtype=float)
        if w_ex.shape != (s,) or w_im.shape != (s,):
            raise TableauError(f'{name}: weights must have {s} entries.')
        if np.any(np.triu(a_ex) != 0):
            raise TableauError(f'{name}: the explicit matrix must be strictly lower triangular.')
        if np.any(np.triu(a_im, k=1) != 0):
            raise TableauError(f'{name}: the implicit matrix must be lower triangular.')
        row_ex = a_ex.sum(axis=1)
        row_im = a_im.sum(axis=1)
        for label, given, rows in (('c_ex', c_ex, row_ex), ('c_im', c_im, row_im)):
            if given is not None and np.max(np.abs(np.asarray(given, dtype=float) - rows)) > ROW_SUM_TOL:
                raise TableauError(f'{name}: {label} is inconsistent with the row sums.')
        self.name = str(name)
        self.s = s
        self.a_ex = _readonly(a_ex)
        self.a_im = _readonly(a_im)
        self.w_ex = _readonly(w_ex)
        self.w_im = _readonly(w_im)
        self.c_ex = _readonly(row_ex if c_ex is None else c_ex)
        self.c_im = _readonly(row_im if c_im is None else c_im)

    def __repr__(self):
        return f'DoubleButcherTableau({self.name!r}, s={self.s})'

    @classmethod
    def _from_dict(cls, d: dict, gamma: float = DEFAULT_GAMMA):
        def parse(value):
            return np.vectorize(lambda x: parse_entry(x, gamma), otypes=[float])(np.array(value, dtype=object))
        try:
            return cls(
                name=d.get('name', 'custom'),
                a_ex=parse(d['a_ex']),
                a_im=parse(d['a_im']),
                w_ex=parse(d['w_ex']),
                w_im=parse(d['w_im']),
                c_ex=None if d.get('c_ex', None) is None else parse(d['c_ex']),
                c_im=None if d.get('c_im', None) is None else parse(d['c_im']),
            )
        except KeyError as err:
            raise TableauError(f'Tableau definition is missing {err}.') from err

    @classmethod
    def from_dict(cls, d: dict, gamma: float = None):
        """
        Construct a tableau from a dictionary.

        Parameters
        ----------
        d : dict
            Keys ``name``, ``a_ex``, ``a_im``, ``w_ex``, ``w_im`` and
            optionally ``c_ex``, ``c_im`` and ``gamma``. A ``preset``
            key loads a builtin instead.
        gamma : float, optional
            Overrides the ``gamma`` key.

        Returns
        -------
        DoubleButcherTableau
            The tableau.
        """
        if gamma is None:
            gamma = float(d.get('gamma', DEFAULT_GAMMA))
        if 'preset' in d.keys():
            return builtin(d['preset'], gamma=gamma)
        return cls._from_dict(d, gamma)

    @classmethod
    def from_yaml(cls, path: Path, gamma: float = None):
        """
        Load a tableau from a YAML file.

        Parameters
        ----------
        path : pathlib.Path
            The file. It holds one tableau definition at the top level.
        gamma : float, optional
            Overrides the ``gamma`` key of the file.

        Returns
        -------
        DoubleButcherTableau
            The tableau.
        """
        with open(path, 'r', encoding='UTF-8') as file:
            data = yaml.safe_load(file)
        return cls.from_dict(data, gamma=gamma)

    @classmethod
    def dp1a242(cls):
        """
        The type-A DP1-A(2,4,2) scheme.
        """
        return cls.from_preset('DP1A242')

    @classmethod
    def dp2a242(cls, gamma: float = DEFAULT_GAMMA):
        """
        The type-A DP2-A(2,4,2) scheme.
        """
        return cls.from_preset('DP2A242', gamma)

    @classmethod
    def ars222(cls, gamma: float = DEFAULT_GAMMA):
        """
        The type-CK ARS(2,2,2) scheme.
        """
        return cls.from_preset('ARS222', gamma)

    @classmethod
    def first_order(cls):
        """
        The first order penalized scheme in stiffly accurate form.
        """
        return cls.from_preset('FirstOrder')


def builtin(name: str, gamma: float = None) -> DoubleButcherTableau:
    """
    Get a builtin tableau by name.

    Parameters
    ----------
    name : str
        One of ``DP1A242``, ``DP2A242``, ``ARS222`` or ``FirstOrder``.
    gamma : float, optional
        The :math:`\\gamma` parameter of DP2A242 and ARS222.

    Returns
    -------
    DoubleButcherTableau
        The tableau.

    Raises
    ------
    TableauError
        If `name` is not a builtin.
    """
    if name not in BUILTIN_NAMES:
        raise TableauError(f'Unknown tableau {name!r}. Choose from {BUILTIN_NAMES}.')
    return DoubleButcherTableau.from_preset(name, DEFAULT_GAMMA if gamma is None else gamma)


def load(spec: str, gamma: float = None) -> DoubleButcherTableau:
    """
    Resolve a tableau given by builtin name or by file path.
    """
    if spec in BUILTIN_NAMES:
        return builtin(spec, gamma)
    path = Path(spec)
    if path.suffix in ('.yaml', '.yml') and path.exists():
        return DoubleButcherTableau.from_yaml(path, gamma)
    raise TableauError(f'{spec!r} is neither a builtin tableau nor a tableau file.')


def classify(t: DoubleButcherTableau) -> TableauType:
    """
    Classify a tableau as type-A, type-CK or other.

    Parameters
    ----------
    t : DoubleButcherTableau
        The tableau.

    Returns
    -------
    TableauType
        ``TYPE_A`` if :math:`A` is invertible, ``TYPE_CK`` if the first
        row of :math:`A` vanishes and the trailing block is invertible,
        ``OTHER`` otherwise.
    """
    diag = np.diag(t.a_im)
    if np.all(diag != 0):
        return TableauType.TYPE_A
    if t.s >= 2 and np.all(t.a_im[0] == 0) and np.all(diag[1:] != 0):
        return TableauType.TYPE_CK
    return TableauType.OTHER


def is_gsa(t: DoubleButcherTableau) -> bool:
    """
    Check whether a tableau is globally stiffly accurate.

    Parameters
    ----------
    t : DoubleButcherTableau
        The tableau.

    Returns
    -------
    bool
        ``True`` if the last rows of both matrices equal the weights.
    """
    return bool(np.array_equal(t.a_ex[-1], t.w_ex) and np.array_equal(t.a_im[-1], t.w_im))
