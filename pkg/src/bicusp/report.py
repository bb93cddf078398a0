"""Optional matplotlib figures summarizing a certificate."""

from collections import Counter

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Rectangle  # noqa: E402

from .boxes import DIM, box_from_code  # noqa: E402

AXIS_NAMES = ("Im L", "Im S", "Im P", "Re L", "Re S", "Re P")
KIND_COLORS = {"B": "tab:gray", "K": "tab:red", "N": "tab:blue", "V": "tab:green", "H": "black"}


def _kind(cond) -> str:
    return str(cond)[0]


def leaf_figure(leaves, root: str, path, title: str = ""):
    """Write a two-panel figure: projected leaf boxes and a leaf-depth histogram.

    ``leaves`` is a sequence of ``(boxcode, condition)``.  Boxes are projected
    onto the two coordinates that the first two splits below ``root`` cut.
    """
    leaves = list(leaves)
    i, j = len(root) % DIM, (len(root) + 1) % DIM
    fig, (ax, hist) = plt.subplots(1, 2, figsize=(11, 4.8))
    for code, cond in leaves:
        box = box_from_code(code)
        (x0, x1), (y0, y1) = box.interval(i), box.interval(j)
        ax.add_patch(Rectangle((x0, y0), x1 - x0, y1 - y0, fill=True, alpha=0.15,
                               facecolor=KIND_COLORS[_kind(cond)], edgecolor="none"))
    rb = box_from_code(root)
    ax.set_xlim(*rb.interval(i))
    ax.set_ylim(*rb.interval(j))
    ax.set_xlabel(AXIS_NAMES[i])
    ax.set_ylabel(AXIS_NAMES[j])
    ax.set_title("leaf boxes (projected)")

    depths = Counter((len(code), _kind(cond)) for code, cond in leaves)
    kinds = sorted({k for _, k in depths})
    levels = sorted({d for d, _ in depths})
    bottom = [0] * len(levels)
    for k in kinds:
        heights = [depths.get((d, k), 0) for d in levels]
        hist.bar(levels, heights, bottom=bottom, color=KIND_COLORS[k], label=k)
        bottom = [b + h for b, h in zip(bottom, heights)]
    hist.set_xlabel("depth")
    hist.set_ylabel("leaves")
    hist.legend(title="condition")
    hist.set_title("leaf depths")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
