"""
File Helpers
"""
from pathlib import Path
import warnings

import yaml
from astropy.table import Table

from EPAP import config


def check_and_build_dir(path: Path) -> None:
    """
    Check and build directory.

    Check if a path exists, if not, create it.

    Parameters
    ----------
    path : pathlib.Path or str
        Path to check and create
    """
    path = Path(path)
    if not path.exists():
        path.mkdir(parents=True)


def get_filename(N: int, n_zfill: int, ext: str, prefix: str = 'fields'):
    """
    Get the filename that a field snapshot is written to.

    Parameters
    ----------
    N : int
        The index of the snapshot.
    n_zfill : int
        The ``zfill()`` convention to use for zero-padding the index.
    ext : str
        The file extension, such as ``'csv'``.
    prefix : str, default='fields'
        The start of the filename.

    Returns
    -------
    str
        The filename

    Warns
    -----
    RuntimeWarning
        If `N` has more digits than `n_zfill` can accommodate.
    """
    if N > (10**(n_zfill)-1):
        warnings.warn(
            f'zfill of {n_zfill} not high enough for snapshot {N}', RuntimeWarning)
    return f'{prefix}_{str(N).zfill(n_zfill)}.{ext}'


def write_table(table: Table, path: Path, meta: dict = None) -> None:
    """
    Write a table as CSV with full precision floats.

    Parameters
    ----------
    table : astropy.table.Table
        The table. Float columns are written with
        ``config.CSV_SIGNIFICANT_DIGITS`` significant digits.
    path : pathlib.Path
        The destination file. Parent directories are created.
    meta : dict, optional
        Written as a single ``#`` comment line above the header.
    """
    path = Path(path)
    check_and_build_dir(path.parent)
    table = table.copy(copy_data=False)
    for name in table.colnames:
        if table[name].dtype.kind == 'f':
            table[name].info.format = f'.{config.CSV_SIGNIFICANT_DIGITS}g'
    if meta:
        line = yaml.safe_dump(meta, default_flow_style=True, width=float('inf')).strip()
        table.meta['comments'] = [line]
    table.write(path, format='ascii.csv', overwrite=True, comment='# ')
