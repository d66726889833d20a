"""Truncated Fock norm of an infrared-singular profile against ln(1/omega_min).

Writes whitespace columns (ln(1/omega_min), value, fit) to stdout.
"""
import numpy as np

from irasym.asymptotics import FreeFieldData, electric_polarization
from irasym.lorentz import four_velocity
from irasym.sympquant import ir_divergence_scan


def main():
    E = electric_polarization([four_velocity([0.3, 0.0, 0.0]), four_velocity([0.0, 0.2, 0.0])], [1, -1])
    scan = ir_divergence_scan(FreeFieldData(E, "step"), 10.0 ** -np.arange(2, 11))
    print(f"# slope {scan['slope']:.8f}, predicted {scan['expected_slope']:.8f}")
    print("# ln(1/omega_min) value fit")
    for w, v in zip(scan["omega_min"], scan["value"]):
        x = np.log(1.0 / w)
        print(f"{x:.6f} {v:.10f} {scan['slope'] * x + scan['intercept']:.10f}")


if __name__ == "__main__":
    main()
