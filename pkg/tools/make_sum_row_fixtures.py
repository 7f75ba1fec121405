"""Write event logs whose matching gives the sum row of the evaluation table.

Counts per column are (GT, TP, FP). Output goes to tests/fixtures/.
"""

from pathlib import Path

from sentinel.events import EventKind, SecurityEvent, write_events

SUM_ROW = [
    (EventKind.ABANDONED, (14, 13, 8)),
    (EventKind.MOVED_BY_OWNER, (10, 5, 4)),
    (EventKind.MOVED_BY_NON_OWNER, (6, 3, 3)),
    (EventKind.THEFT, (8, 5, 1)),
]


def build():
    gt, pred = [], []
    frame = 0
    for kind, (n_gt, n_tp, n_fp) in SUM_ROW:
        for k in range(n_gt):
            frame += 1000
            oid = f"{kind.value}-{k}"
            gt.append(SecurityEvent(frame, kind, oid, "P1"))
            if k < n_tp:
                pred.append(SecurityEvent(frame + 10, kind, oid, "P1"))
        for k in range(n_fp):
            frame += 1000
            pred.append(SecurityEvent(frame, kind, f"spurious-{kind.value}-{k}", "P2"))
    return pred, gt


def main():
    out = Path(__file__).resolve().parents[1] / "tests" / "fixtures"
    out.mkdir(exist_ok=True)
    pred, gt = build()
    write_events(out / "sum_row_pred.jsonl", pred)
    write_events(out / "sum_row_gt.jsonl", gt)


if __name__ == "__main__":
    main()
