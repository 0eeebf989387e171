"""Node roles in clustered co-author networks and name-ambiguity distortion.

Roles follow the within-module degree / participation coefficient taxonomy
of Guimera et al. Both statistics use unweighted degrees, so roles do not
change when edge weights are rescaled.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Mapping

import numpy as np

from .community.partition import Partition
from .graph import Network

__all__ = [
    "ROLES",
    "HUB_ROLES",
    "RoleThresholds",
    "NodeRoleProfile",
    "DistortionReport",
    "within_module_z",
    "participation_coefficient",
    "classify_role",
    "profile_roles",
    "distortion_report",
    "ks_distance",
    "ks_critical_value",
    "roles_to_csv",
]

ROLES = (
    "ultra_peripheral",
    "peripheral",
    "connector",
    "satellite_connector",
    "provincial_hub",
    "connector_hub",
    "satellite_connector_hub",
)
HUB_ROLES = frozenset(ROLES[4:])


@dataclass(frozen=True)
class RoleThresholds:
    hub_z: float = 2.5
    nonhub_p: tuple[float, float, float] = (0.05, 0.62, 0.80)
    hub_p: tuple[float, float] = (0.30, 0.75)


@dataclass(frozen=True)
class NodeRoleProfile:
    z: float
    p: float
    role: str

    @property
    def is_hub(self) -> bool:
        return self.role in HUB_ROLES


def _check(net: Network, part: Partition) -> None:
    missing = [n for n in net.nodes if n not in part]
    if missing:
        raise ValueError(f"partition misses {len(missing)} nodes, e.g. {missing[0]!r}")


def _module_degrees(net: Network, part: Partition) -> dict[Hashable, dict[Hashable, int]]:
    out = {}
    for n in net.nodes:
        counts: dict[Hashable, int] = {}
        for m in net.neighbors(n):
            c = part[m]
            counts[c] = counts.get(c, 0) + 1
        out[n] = counts
    return out


def within_module_z(net: Network, part: Partition) -> dict[Hashable, float]:
    """z-score of each node's within-module degree against its module.

    Population standard deviation; a module whose members all have the same
    internal degree gives z = 0 for every member.
    """
    _check(net, part)
    deg = _module_degrees(net, part)
    kappa = {n: deg[n].get(part[n], 0) for n in net.nodes}
    members: dict[Hashable, list] = {}
    for n in net.nodes:
        members.setdefault(part[n], []).append(n)
    z = {}
    for nodes in members.values():
        vals = np.array([kappa[n] for n in nodes], dtype=float)
        mean, std = vals.mean(), vals.std()
        for n, k in zip(nodes, vals):
            z[n] = 0.0 if std == 0 else float((k - mean) / std)
    return z


def participation_coefficient(net: Network, part: Partition) -> dict[Hashable, float]:
    _check(net, part)
    out = {}
    for n, counts in _module_degrees(net, part).items():
        k = sum(counts.values())
        if k == 0:
            out[n] = 0.0
            continue
        out[n] = 1.0 - sum((c / k) ** 2 for c in counts.values())
    return out


def classify_role(z: float, p: float, thresholds: RoleThresholds = RoleThresholds()) -> str:
    if z >= thresholds.hub_z:
        lo, hi = thresholds.hub_p
        if p <= lo:
            return "provincial_hub"
        if p <= hi:
            return "connector_hub"
        return "satellite_connector_hub"
    a, b, c = thresholds.nonhub_p
    if p <= a:
        return "ultra_peripheral"
    if p <= b:
        return "peripheral"
    if p <= c:
        return "connector"
    return "satellite_connector"


def profile_roles(
    net: Network, part: Partition, thresholds: RoleThresholds = RoleThresholds()
) -> dict[Hashable, NodeRoleProfile]:
    z = within_module_z(net, part)
    p = participation_coefficient(net, part)
    return {n: NodeRoleProfile(z[n], p[n], classify_role(z[n], p[n], thresholds)) for n in net.nodes}


def roles_to_csv(profiles: Mapping[Hashable, NodeRoleProfile]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["node", "z", "p", "role"])
    for n, prof in profiles.items():
        w.writerow([n, repr(prof.z), repr(prof.p), prof.role])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# distortion monitoring


def ks_distance(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    grid = np.union1d(a, b)
    fa = np.searchsorted(a, grid, side="right") / len(a)
    fb = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.max(np.abs(fa - fb)))


def ks_critical_value(n: int, m: int, alpha: float = 0.05) -> float:
    """Asymptotic two-sample critical value c(alpha) * sqrt((n + m) / (n m))."""
    c = math.sqrt(-math.log(alpha / 2) / 2)
    return c * math.sqrt((n + m) / (n * m))


@dataclass
class DistortionReport:
    per_role_cdf: dict[str, list[tuple[float, float]]]
    role_sizes: dict[str, int]
    pair_ks: dict[tuple[str, str], float]
    critical_values: dict[tuple[str, str], float]
    max_ks: float | None
    flagged_pairs: list[tuple[str, str]]
    alpha: float
    insufficient: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def distorted(self) -> bool:
        return bool(self.flagged_pairs)

    def cdf_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["role", "commonality", "cumulative_probability"])
        for role, pts in self.per_role_cdf.items():
            for x, y in pts:
                w.writerow([role, x, repr(y)])
        return buf.getvalue()

    def summary(self) -> str:
        lines = ["# name-commonality distortion by node role"]
        for role in ROLES:
            if role in self.role_sizes:
                lines.append(f"role {role}: n={self.role_sizes[role]}")
        if self.insufficient:
            lines.append("max_ks: undefined (fewer than two roles with enough members)")
        else:
            lines.append(f"max_ks: {self.max_ks:.4f}")
            for pair, d in sorted(self.pair_ks.items()):
                flag = " FLAGGED" if pair in self.flagged_pairs else ""
                lines.append(f"ks {pair[0]} vs {pair[1]}: {d:.4f} (critical {self.critical_values[pair]:.4f}){flag}")
        lines.extend(self.notes)
        return "\n".join(lines) + "\n"


def distortion_report(
    profiles: Mapping[Hashable, NodeRoleProfile],
    commonality: Mapping[Hashable, int],
    min_members: int = 30,
    alpha: float = 0.05,
    bonferroni: bool = True,
) -> DistortionReport:
    """Compare last-name commonality distributions across node roles.

    ``commonality`` maps each profiled node to the commonality of its last
    name. Every pair of roles with at least ``min_members`` nodes gets a
    two-sample KS distance; a pair is flagged when it exceeds the critical
    value at ``alpha`` (divided by the number of pairs when ``bonferroni``).
    """
    values: dict[str, list[int]] = {}
    for node, prof in profiles.items():
        if node not in commonality:
            raise ValueError(f"no commonality value for node {node!r}")
        values.setdefault(prof.role, []).append(commonality[node])
    cdfs = {}
    for role in ROLES:
        if role not in values:
            continue
        xs = np.sort(np.asarray(values[role]))
        uniq = np.unique(xs)
        cum = np.searchsorted(xs, uniq, side="right") / len(xs)
        cdfs[role] = [(int(x), float(c)) for x, c in zip(uniq, cum)]
    sizes = {r: len(values[r]) for r in ROLES if r in values}
    eligible = [r for r in ROLES if sizes.get(r, 0) >= min_members]
    pairs = list(combinations(eligible, 2))
    if not pairs:
        return DistortionReport(cdfs, sizes, {}, {}, None, [], alpha, insufficient=True,
                                notes=[f"roles with >= {min_members} members: {len(eligible)}"])
    a = alpha / len(pairs) if bonferroni else alpha
    pair_ks, crit, flagged = {}, {}, []
    for r1, r2 in pairs:
        d = ks_distance(values[r1], values[r2])
        c = ks_critical_value(sizes[r1], sizes[r2], a)
        pair_ks[(r1, r2)], crit[(r1, r2)] = d, c
        if d > c:
            flagged.append((r1, r2))
    notes = [f"per-pair alpha {a:.5f} ({'Bonferroni over ' + str(len(pairs)) + ' pairs' if bonferroni else 'unadjusted'})"]
    return DistortionReport(cdfs, sizes, pair_ks, crit, max(pair_ks.values()), flagged, alpha, notes=notes)
