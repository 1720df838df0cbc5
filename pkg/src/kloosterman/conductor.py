"""Conductor and gamma-factor bookkeeping for the adjoint parameter.

For an orthogonal 2n-dimensional tau with Swan conductor 1 and a tame
quadratic omega, Ad = wedge^2 tau + tau (x) omega has no inertia
invariants, so its Artin conductor is Sw + dim and the gamma factor at 0
has magnitude q^(Ar/2).  Everything here is exact integer arithmetic; the
Steinberg gamma factor in the formal-degree ratio is carried as a symbol.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction

from .finite_field import prime_factors


@dataclass(frozen=True)
class ConductorReport:
    n: int
    q: int
    swan_exterior: int
    swan_tau: int
    swan_ad: int
    dim_ad: int
    artin_ad: int
    gamma_log_q: int
    formal_degree_ratio_log_q: int
    formal_degree_ratio_factor: Fraction
    s_group_order: int
    dim_rho: int
    source: str = "computed"

    @property
    def conjecture_constant(self) -> Fraction:
        """dim rho / #S."""
        return Fraction(self.dim_rho, self.s_group_order)

    @property
    def formal_degree_ratio(self) -> str:
        return f"{self.formal_degree_ratio_factor} * q^{self.formal_degree_ratio_log_q} / |gamma(0, Ad o phi_St, psi)|"

    def check(self) -> list[str]:
        """Invariant violations, empty when consistent."""
        bad = []
        if self.swan_ad != self.swan_exterior + self.swan_tau:
            bad.append("swan_ad != swan_exterior + swan_tau")
        if self.dim_ad != (2 * self.n) * (2 * self.n + 1) // 2:
            bad.append("dim_ad != dim wedge^2 + dim tau")
        if self.artin_ad != self.swan_ad + self.dim_ad:
            bad.append("artin_ad != swan_ad + dim_ad")
        if self.artin_ad % 2 or self.gamma_log_q * 2 != self.artin_ad:
            bad.append("gamma_log_q != artin_ad / 2")
        if self.gamma_log_q != self.n * self.n + self.n:
            bad.append("gamma_log_q != n^2 + n")
        return bad

    def to_json(self) -> dict:
        out = asdict(self)
        out["formal_degree_ratio_factor"] = str(self.formal_degree_ratio_factor)
        out["conjecture_constant"] = str(self.conjecture_constant)
        out["formal_degree_ratio"] = self.formal_degree_ratio
        return out


def _odd_prime_power(q: int) -> tuple[int, int]:
    """(p, f) with q = p^f, p odd."""
    ps = prime_factors(q) if q > 1 else []
    if len(ps) != 1:
        raise ValueError(f"q = {q} is not a prime power")
    p, f, m = ps[0], 0, q
    while m % p == 0:
        m //= p
        f += 1
    if p == 2:
        raise ValueError("residue characteristic 2 is excluded")
    return p, f


def conductor_report(n: int, q: int, swan_exterior: int, source: str = "computed") -> ConductorReport:
    """Assemble the report from Sw(wedge^2 tau) for dim tau = 2n."""
    if n < 2:
        raise ValueError("n must be >= 2")
    _odd_prime_power(q)
    if swan_exterior != n - 1:
        raise ValueError(f"Sw(wedge^2 tau) = {swan_exterior} is inconsistent with dim tau = {2 * n} (expected {n - 1})")
    swan_tau = 1
    swan_ad = swan_exterior + swan_tau
    dim_ad = 2 * n * n + n
    artin = swan_ad + dim_ad
    return ConductorReport(
        n=n,
        q=q,
        swan_exterior=swan_exterior,
        swan_tau=swan_tau,
        swan_ad=swan_ad,
        dim_ad=dim_ad,
        artin_ad=artin,
        gamma_log_q=artin // 2,
        formal_degree_ratio_log_q=artin // 2,
        formal_degree_ratio_factor=Fraction(1, 2),
        s_group_order=2,
        dim_rho=1,
        source=source,
    )


@dataclass(frozen=True)
class CrossCheck:
    ok: bool
    report: ConductorReport | None
    L: object
    problems: tuple = ()


def cross_check(n: int, q: int, method: str = "auto", jobs: int = 1) -> CrossCheck:
    """Compute Sw(wedge^2 Kl_2n) over F_q and feed it through conductor_report."""
    from .charsum import SheafSpec
    from .finite_field import make_field
    from .lfunction import default_R, default_max_deg, discover_lfunction, sheaf_power_sums, swan_from_L

    p, f = _odd_prime_power(q)
    spec = SheafSpec(make_field(p, f), 2 * n)
    max_deg = default_max_deg(2 * n)
    sums = sheaf_power_sums(spec, default_R(max_deg), "exterior", method, jobs)
    L = discover_lfunction(sums, max_deg)
    swan = swan_from_L(L, tame_at_zero=True)
    try:
        report = conductor_report(n, q, swan)
    except ValueError as exc:
        return CrossCheck(False, None, L, (str(exc),))
    problems = tuple(report.check())
    return CrossCheck(not problems, report, L, problems)
