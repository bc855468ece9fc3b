"""Smoke test for the dlpack_py extension module."""

import json
import math

import dlpack_py


def main():
    pent = dlpack_py.regular(5)
    assert len(pent) == 5 and abs(pent[0][0] - 1.0) < 1e-15

    density = dlpack_py.density(pent)
    assert abs(density - (5 - math.sqrt(5)) / 3) < 1e-9, density

    area, pts = dlpack_py.minimize(pent)
    assert len(pts) == 6 and abs(area - 1.2903580504417251) < 1e-9

    status, d = dlpack_py.certify_status(dlpack_py.regular(7), trials=2000)
    assert status == "strongly_extreme" and abs(d - 0.8926) < 1e-4, (status, d)

    status, _ = dlpack_py.certify_status(dlpack_py.regular(6), trials=100)
    assert status == "exceptional_type_i", status

    a = dlpack_py.report_json(pent, trials=1000, seed=3)
    b = dlpack_py.report_json(pent, trials=1000, seed=3)
    assert a == b
    assert json.loads(a)["result"]["status"] == "strongly_extreme"

    try:
        dlpack_py.normalize([(0, 0), (2, 0), (1, 0.2), (2, 2), (0, 2)])
    except ValueError as e:
        assert "convex" in str(e)
    else:
        raise AssertionError("non-convex input accepted")

    print("smoke test passed: pentagon density %.12f" % density)


if __name__ == "__main__":
    main()
