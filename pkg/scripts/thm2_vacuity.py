"""Show that the web-side residuals vanish on webs that are not closed.

For each seed a perturbed (not closed) adapted pair is built; the script prints
the thm1 residual next to the two web-side residuals. The first is order one,
the others sit at rounding level.
"""

import sys

from symdiff3.criteria import thm1_evaluate, thm2_evaluate
from symdiff3.fixtures import eta_of, gen_closed, gen_perturbed
from symdiff3.series import max_abs_coeff
from symdiff3.web import adapt_coordinates, build_frame


def main(count: int) -> None:
    print(f"{'seed':>4} {'thm1':>10} {'res_a':>10} {'res_s':>10}")
    for seed in range(count):
        eta = eta_of(gen_perturbed(seed, gen_closed(seed)))
        frame = build_frame(eta)
        t2 = thm2_evaluate(frame)
        chart = adapt_coordinates(eta, frame)
        t1 = thm1_evaluate(chart.a, chart.b)
        r1 = max(max_abs_coeff(s, s.valid_order) for s in (t1.r1, t1.r2))
        ra = max_abs_coeff(t2.res_a.r, t2.res_a.r.valid_order)
        rs = max_abs_coeff(t2.res_s.r, t2.res_s.r.valid_order)
        print(f"{seed:>4} {r1:10.2e} {ra:10.2e} {rs:10.2e}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 10)
