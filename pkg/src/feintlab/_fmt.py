import csv
import io


def num(x: float) -> str:
    """Shortest round-trip decimal for ``x``; negative zero prints as 0.0."""
    x = float(x)
    if x == 0:
        x = 0.0
    return repr(x)


def csv_text(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()
