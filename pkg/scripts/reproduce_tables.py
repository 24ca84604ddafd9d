"""Metric columns of every bundled box next to the published values.

    python scripts/reproduce_tables.py
"""

from sboxlab.calibration import check_column
from sboxlab.fixtures import PAPER_COLUMNS, load_fixture
from sboxlab.metrics import ROW_ORDER, full_report


def fmt(v):
    if isinstance(v, bool):
        return "yes" if v else "no"
    return f"{float(v):.3f}" if isinstance(v, float) or hasattr(v, "denominator") and v.denominator != 1 else str(v)


def main():
    by_table = {}
    for name, col in PAPER_COLUMNS.items():
        by_table.setdefault(col["table"], []).append(name)
    for table, names in sorted(by_table.items()):
        print(f"\nTable {table}")
        reports = {n: full_report(load_fixture(n).sbox) for n in names}
        print("metric".ljust(8) + "".join(n.ljust(26) for n in names))
        for label, field in ROW_ORDER:
            cells = []
            for n in names:
                got = fmt(getattr(reports[n], field))
                want = PAPER_COLUMNS[n].get(field)
                cells.append(f"{got} ({fmt(want) if want is not None else '-'})".ljust(26))
            print(label.ljust(8) + "".join(cells))
        for n in names:
            off = [f"{r.field}" for r in check_column(n) if not r.ok]
            if off:
                print(f"  {n}: rows differing from the published column: {', '.join(off)}")


if __name__ == "__main__":
    main()
