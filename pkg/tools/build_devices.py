"""Regenerate the bundled device files under src/qubithammer/data."""

from qubithammer.device import DATA_DIR, save_device
from qubithammer.lattices import build_ankaa82, build_eagle127

if __name__ == "__main__":
    for cfg in (build_eagle127(), build_ankaa82()):
        path = DATA_DIR / f"{cfg.name}.json"
        save_device(cfg, path)
        print(f"{path}: {cfg.n_qubits} qubits, {len(cfg.topology.edges)} edges")
