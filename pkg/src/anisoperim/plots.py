"""Figure rendering for report output.

Uses the Agg backend and writes SVG with a pinned hash salt and no
timestamp metadata, so figures are reproducible byte for byte.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "anisoperim"

_SAVE = {"format": "svg", "metadata": {"Date": None}}


def save_profile(path, profile):
    """Area and perimeter of the superlevel sets against the level."""
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(profile.t, profile.mu, label="area", color="tab:blue")
    ax.plot(profile.t, profile.lam, label="perimeter", color="tab:red")
    ax.set_xlabel("level t")
    ax.set_title(profile.name or "level set profile")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)


def save_comparison(path, rows, title=""):
    """Rearranged field against the radial model, rows as in write_comparison."""
    s = [row[0] for row in rows]
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(s, [row[1] for row in rows], label="rearranged", color="tab:blue")
    ax.plot(s, [row[2] for row in rows], label="radial model",
            color="tab:red", linestyle="--")
    ax.set_xlabel("perimeter coordinate")
    ax.set_title(title or "pointwise comparison")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)


def _closed(vertices):
    xs = list(vertices[:, 0]) + [vertices[0, 0]]
    ys = list(vertices[:, 1]) + [vertices[0, 1]]
    return xs, ys


def save_overlay(path, domain, symmetrized, title=""):
    """Original domain against the Wulff-shaped support of the rearrangement."""
    fig, ax = plt.subplots(figsize=(4.4, 4.4))
    xs, ys = _closed(domain.vertices)
    ax.plot(xs, ys, label="domain", color="tab:blue")
    xs, ys = _closed(symmetrized.domain.vertices)
    ax.plot(xs, ys, label=f"{symmetrized.kind} model", color="tab:red",
            linestyle="--")
    ax.set_aspect("equal")
    ax.set_title(title or "symmetrization")
    ax.legend(frameon=False, loc="upper right", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)
