#!/usr/bin/env python3
"""Generate configs/spar_paper_like.mat: a spar-like 6-DOF coefficient set
whose diagonal frequency-response peaks land at the reference resonances
(surge/sway 0.0185 Hz, heave 0.14 Hz).

The hull is a 10 m diameter, 10 m tall cylinder, ~760 t, centre of gravity
~7 m below deck. Heave hydrostatic stiffness comes from the waterplane
(rho g pi R^2); mooring stiffness and the heave added mass are tuned
numerically so the damped response peaks sit at the targets. Radiation
memory uses one second-order band-pass kernel per DOF (zero DC gain):

    K_rad_i(s) = beta_i s / (s^2 + 2 zeta_i w0_i s + w0_i^2)

Run from the repository root:  python3 tools/tune_platform.py
"""

import numpy as np

RHO_G_AW = 1025.0 * 9.81 * np.pi * 5.0**2  # waterplane heave stiffness, N/m

TARGET_SWAY_HZ = 0.0185
TARGET_HEAVE_HZ = 0.14


def band_pass_kernels(params):
    """Block-diagonal state space (2 states per DOF) from (w0, zeta, beta)."""
    n = 12
    A = np.zeros((n, n))
    B = np.zeros((n, 6))
    C = np.zeros((6, n))
    for i, (w0, zeta, beta) in enumerate(params):
        r = 2 * i
        A[r, r + 1] = 1.0
        A[r + 1, r] = -w0 * w0
        A[r + 1, r + 1] = -2.0 * zeta * w0
        B[r + 1, i] = 1.0
        C[i, r + 1] = beta
    return A, B, C


def response_mag(freq_hz, dof, M_tot, K_tot, B_m, A, B, C):
    out = np.empty_like(freq_hz)
    n = A.shape[0]
    for k, f in enumerate(freq_hz):
        w = 2.0 * np.pi * f
        Krad = C @ np.linalg.solve(1j * w * np.eye(n) - A, B)
        H = np.linalg.inv(-w * w * M_tot + 1j * w * (B_m + Krad) + K_tot)
        out[k] = abs(H[dof, dof])
    return out


def peak_frequency(dof, M_tot, K_tot, B_m, A, B, C, lo, hi):
    grid = np.linspace(lo, hi, 4001)
    mags = response_mag(grid, dof, M_tot, K_tot, B_m, A, B, C)
    k = int(np.argmax(mags))
    return grid[k]


def main():
    mass = np.diag([760e3, 760e3, 760e3, 1.5e8, 1.5e8, 1.1e7])
    added = np.diag([700e3, 700e3, 2.35e5, 1.5e8, 1.5e8, 1.0e6])
    kh = np.diag([0.0, 0.0, RHO_G_AW, 1.46e7, 1.46e7, 0.0])
    mm = np.diag([4e4, 4e4, 4e4, 1e5, 1e5, 1e5])
    bm = np.diag([1e4, 1e4, 5e3, 1e5, 1e5, 1e4])
    km = np.diag([2.03e4, 2.03e4, 5e3, 1e5, 1e5, 5e4])

    # Radiation kernels: sway/surge damping carries the resonance Q, heave
    # sits in the wave band, rotations heavily damped.
    kernels = [
        (0.22, 0.7, 6.0e4),
        (0.22, 0.7, 6.0e4),
        (0.8796, 0.7, 2.23e5),
        (0.22, 0.7, 5.1e6),
        (0.22, 0.7, 5.1e6),
        (0.30, 0.7, 1.0e5),
    ]
    A, B, C = band_pass_kernels(kernels)

    # Tune surge/sway mooring stiffness so each damped peak hits the target
    # (bisection; the peak location is monotone in the stiffness).
    for dof in (0, 1):
        k_lo, k_hi = 5e3, 3e5
        for _ in range(60):
            k = 0.5 * (k_lo + k_hi)
            km[dof, dof] = k
            M_tot = mass + added + mm
            K_tot = kh + km
            f_pk = peak_frequency(dof, M_tot, K_tot, bm, A, B, C, 0.004, 0.05)
            if f_pk < TARGET_SWAY_HZ:
                k_lo = k
            else:
                k_hi = k
            if abs(f_pk / TARGET_SWAY_HZ - 1.0) < 1e-4:
                break

    # Tune heave added mass for the heave peak.
    a33 = added[2, 2]
    for _ in range(20):
        M_tot = mass + added + mm
        K_tot = kh + km
        f_pk = peak_frequency(2, M_tot, K_tot, bm, A, B, C, 0.08, 0.2)
        err = f_pk / TARGET_HEAVE_HZ - 1.0
        if abs(err) < 2e-4:
            break
        m_tot33 = mass[2, 2] + a33 + mm[2, 2]
        a33 = m_tot33 * (f_pk / TARGET_HEAVE_HZ) ** 2 - mass[2, 2] - mm[2, 2]
        added[2, 2] = a33

    M_tot = mass + added + mm
    K_tot = kh + km
    print(f"sway mooring stiffness : {km[1, 1]:.6g} N/m")
    print(f"heave added mass       : {added[2, 2]:.6g} kg")
    for dof, lo, hi, name in ((0, 0.004, 0.05, "surge"), (1, 0.004, 0.05, "sway"), (2, 0.08, 0.2, "heave")):
        f_pk = peak_frequency(dof, M_tot, K_tot, bm, A, B, C, lo, hi)
        print(f"{name:6s} peak: {f_pk:.5f} Hz")
    probe = np.array([0.0151, 0.0185, 0.0191, 0.024, 0.0282, 0.0305, 0.033, 0.0369])
    mags = response_mag(probe, 1, M_tot, K_tot, bm, A, B, C)
    for f, m in zip(probe, mags):
        print(f"  |H22({f:.4f} Hz)| = {m:.4g} m/N = {m*1e3:.4g} m/kN")
    print(f"  baseline eta ratio proxy |H(0.0191)|/|H(0.0369)| = {mags[2]/mags[7]:.2f}")
    print(f"  planner flatness proxy |H(0.0282)|/|H(0.033)| = {mags[4]/mags[6]:.2f}")

    # Unidirectional (+x) wave excitation coefficients on a coarse grid:
    # long-wave heave from the waterplane with depth decay, surge from the
    # inertial (Froude-Krylov-like) load, pitch from the surge lever arm.
    displaced_mass = 1025.0 * np.pi * 25.0 * 9.0
    rows = []
    for f in np.arange(0.02, 1.0001, 0.02):
        w = 2.0 * np.pi * f
        kwave = w * w / 9.81  # deep water
        decay = np.exp(-kwave * 4.5)
        x1 = displaced_mass * 1.7 * w * w * decay
        x3 = RHO_G_AW * decay
        x5 = -3.0 * x1
        coeffs = np.zeros(12)
        coeffs[0] = x1  # surge, real part
        coeffs[4] = x3  # heave, real part
        coeffs[8] = x5  # pitch, real part
        rows.append((f, coeffs))

    def emit_matrix(lines, name, m, dims=""):
        lines.append(name + dims)
        for row in np.atleast_2d(m):
            lines.append(" ".join(repr(float(v)) for v in row))

    lines = [
        "# Spar-like platform coefficient set, SI units.",
        "# Generated by tools/tune_platform.py; diagonal response peaks:",
        "#   surge/sway 0.0185 Hz, heave 0.14 Hz.",
    ]
    emit_matrix(lines, "M", mass)
    emit_matrix(lines, "Minf", added)
    emit_matrix(lines, "Kh", kh)
    emit_matrix(lines, "Mm", mm)
    emit_matrix(lines, "Bm", bm)
    emit_matrix(lines, "Km", km)
    emit_matrix(lines, "A", A, " 12")
    emit_matrix(lines, "B", B, " 12")
    emit_matrix(lines, "C", C, " 12")
    emit_matrix(lines, "D", np.zeros((6, 6)))
    lines.append(f"EXC {len(rows)}")
    for f, coeffs in rows:
        lines.append(repr(float(f)) + " " + " ".join(repr(float(v)) for v in coeffs))

    with open("configs/spar_paper_like.mat", "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print("wrote configs/spar_paper_like.mat")


if __name__ == "__main__":
    main()
