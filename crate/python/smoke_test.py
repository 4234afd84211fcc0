"""Smoke test for the walshlab_py extension module.

Build the extension and make it importable first, e.g.:
    cargo build -p walshlab-py --release
    cp target/release/libwalshlab_py.so python/walshlab_py.so
    PYTHONPATH=python python3 python/smoke_test.py
"""

import json

import walshlab_py as wl


def main() -> None:
    # polynomial certification
    e13_nsq = {
        "model": "z1",
        "dim": 3,
        "factors": [{"row": 0, "col": 2, "poly": [{"coeff": "1", "powers": [[0, 2]]}]}],
    }
    assert wl.Map.from_json(json.dumps(e13_nsq)).verify(degree=2) == "certified"

    # complexity calculus
    assert wl.complexity_bound("1", 1) == "3"
    assert wl.complexity_bound("1", 2) == "20"
    assert wl.complexity_bound("2", 1) == "21"
    assert wl.complexity_bound("-inf", 7) == "0"
    hom = {
        "model": "z1",
        "dim": 3,
        "maps": [[], [{"row": 0, "col": 1, "poly": [{"coeff": "1", "powers": [[0, 1]]}]}]],
    }
    assert wl.System.from_json(json.dumps(hom)).certify(budget=4) == 1

    # Følner machinery
    assert wl.phi_z("1/2", 3) == "9"
    assert wl.sup_ratio("z1", 2, 10) == "1/5"

    # exact averages on the Z/4 rotation
    action = {
        "model": "z1",
        "space": {"weights": ["1/4"] * 4},
        "maps": [
            {"factors": [], "period": 1},
            {
                "factors": [
                    {"base": [1, 2, 3, 0], "exponent": [{"coeff": "1", "powers": [[0, 1]]}]}
                ],
                "period": 4,
            },
        ],
        "observables": [["1", "0", "0", "0"], ["1", "0", "0", "0"]],
    }
    act = wl.Action.from_json(json.dumps(action))
    assert act.period() == 4
    assert act.average(12) == ["1/4", "0", "0", "0"]
    assert act.limit() == ["1/4", "0", "0", "0"]

    # quantitative von Neumann sequence
    k, ms = wl.vn_sequence("1/2", "2*M", "10")
    assert k == 145 and ms[0] == "10"

    # growth grammar and rate tuples
    assert wl.growth_eval("max(M, 10)^2", "3") == "100"
    tup = json.loads(wl.main_tuple("1/2", 1, "2*M", "3", delta_override="1/2"))
    assert tup["count"] == "8" and tup["entries"][0] == "3"
    deep = json.loads(wl.main_tuple("6", 2, "2*M", "1"))
    assert "description" in deep  # honest degradation at real scale

    print("smoke test: all assertions passed")


if __name__ == "__main__":
    main()
