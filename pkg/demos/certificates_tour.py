"""Sign checks of the sub- and supersolutions behind the envelopes.

Each construction is evaluated on a sample of (t, x) points. Subsolutions
need residual <= 0 and supersolutions residual >= 0, up to quadrature
tolerance. The constants each construction picked are printed as well.

Usage: python demos/certificates_tour.py
"""

from __future__ import annotations

from fatfront import certificates as cert
from fatfront.kernels import catalog
from fatfront.reaction import Logistic


def show(rep) -> None:
    (t, x), r = rep.worst
    print(f"{rep.construction:6s} {'pass' if rep.verdict else 'FAIL'}  {len(rep.points):4d} points, "
          f"worst residual {r:+.2e} at t = {t:.3g}, x = {x:.4g}")


def main() -> None:
    kernels, f = catalog(), Logistic()
    stretched, algebraic = kernels["fig1"], kernels["fig2a"]

    step1 = cert.check_linear_subsolution(stretched)
    show(step1)
    print(f"       C = {step1.constants['C']:.4f}")

    sub = cert.build_step2_subsolution(stretched, f, 0.5)
    show(cert.check_step2_subsolution(sub, stretched, f))
    print(f"       xi1 = {sub.xi1:.4g}, B = {sub.B:.4g}, plateau {sub.lambda2:.3g}, "
          f"xi0(10) = {sub.xi0(10.0):.4g}")

    sup1 = cert.build_hyp1_supersolution(stretched, f, 0.5)
    show(cert.check_hyp1_supersolution(sup1, stretched, f))
    print(f"       tau = {sup1.tau:.4g}, int J e^phi = {sup1.integral:.6f}, rho0 = {sup1.rho0:.6f}")

    sup2 = cert.build_hyp2_supersolution(algebraic, f)
    show(cert.check_hyp2_supersolution(sup2, algebraic, f))
    print(f"       K = {sup2.K:.6f} at x = {sup2.x_star:.4g}, rho0 = {sup2.rho0:.6f}")

    try:
        cert.build_step2_subsolution(kernels["log_sublinear"], f, 0.5)
    except cert.ConstructionError as exc:
        print(f"step2 on the log-sublinear kernel is not representable: {exc}")


if __name__ == "__main__":
    main()
