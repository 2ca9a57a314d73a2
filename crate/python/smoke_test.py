"""Quick check that the compiled extension loads and agrees with known values."""

import math

import pareto_tas as pt


def close(a, b, tol):
    return math.isclose(a, b, rel_tol=tol, abs_tol=tol)


def main():
    covid = pt.BanditInstance.covid()
    assert covid.num_arms == 20 and covid.dim == 3
    assert covid.pareto_set() == [8, 18], covid.pareto_set()

    # one objective, two arms a gap of 1 apart
    toy = pt.BanditInstance([[0.0], [1.0]])
    assert pt.pareto_set([[0.0], [1.0]]) == [1]
    r = pt.min_alt_cost(toy, [0.5, 0.5])
    assert close(r.cost, 0.125, 1e-12), r
    assert r.kind in ("remove", "add")
    assert close(sum(w * g for w, g in zip([0.5, 0.5], r.gradient)), r.cost, 1e-12)
    g = pt.min_alt_cost(toy, [0.5, 0.5], strategy="generic")
    assert close(g.cost, r.cost, 1e-12)

    s = pt.solve_t_star(toy, iterations=100_000, tolerance=1e-6)
    assert s.converged and close(s.t_star, 8.0, 1e-4), (s.t_star, s.weights)

    rec = pt.run(pt.BanditInstance([[0.0], [5.0]]), delta=0.1, seed=3)
    assert rec.correct and not rec.aborted and rec.tau == sum(rec.counts), rec

    same = pt.BanditInstance.from_json(covid.to_json())
    assert same.means == covid.means and same.labels == covid.labels

    try:
        pt.BanditInstance([[0.0, 1.0], [1.0]])
    except ValueError:
        pass
    else:
        raise AssertionError("ragged means accepted")

    print(f"pareto_tas {pt.__version__}: ok (toy tau {rec.tau})")


if __name__ == "__main__":
    main()
