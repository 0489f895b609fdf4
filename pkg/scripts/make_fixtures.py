"""Write the worked-example networks and plans to fixtures/ as JSON."""
import argparse
import json
from pathlib import Path

from nnsym import fixtures
from nnsym.network import save


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "fixtures"))
    out = Path(ap.parse_args().out)
    out.mkdir(parents=True, exist_ok=True)
    for name, fn in sorted(fixtures.ALL.items()):
        save(fn(), out / f"{name}.json")
    for i, plan in enumerate(fixtures.fig3_plans(), 1):
        with open(out / f"fig3_plan{i}.json", "w") as fh:
            json.dump(plan.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")
    net, plan = fixtures.orphan_plan_fixture()
    save(net, out / "orphan_net.json")
    with open(out / "orphan_plan.json", "w") as fh:
        json.dump(plan.to_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(f"wrote fixtures to {out}")


if __name__ == "__main__":
    main()
