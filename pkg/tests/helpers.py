from successor_ratios.factor import SpfTable


def corrupt(table: SpfTable, n: int, value: int) -> SpfTable:
    """Copy of ``table`` with one entry overwritten."""
    spf = table.spf.copy()
    spf[n] = value
    spf.setflags(write=False)
    return SpfTable(limit=table.limit, spf=spf)
