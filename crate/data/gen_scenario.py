"""Writes one-decoy count scenarios for the key-rate fixture.

Finite-key bounds on vacuum and single-photon detections and on the phase
error rate follow the standard one-decoy analysis (Hoeffding fluctuation
terms, 21/eps splitting). Dead time is ignored.

    python3 gen_scenario.py > keyrate_q32.scenario
"""
import math


def model(loss_db, q=32, mu1=0.5, mu2=0.1, p1=0.7, e_mis=0.01, eta_det=0.86, dark=330, rate=487e6,
          il_z=1, il_x=3, nz=1e8, eps=1e-12, pz=0.9):
    pd = dark / rate
    def det(mu, il):
        eta = 10 ** (-(loss_db + il) / 10) * eta_det
        click = 1 - math.exp(-mu * eta)
        p = click + q * pd
        err = e_mis * click + (q - 1) * pd
        return p, err
    p2 = 1 - p1
    taus = lambda n: p1 * math.exp(-mu1) * mu1**n / math.factorial(n) + p2 * math.exp(-mu2) * mu2**n / math.factorial(n)
    # Z-basis detections split by intensity, scaled to a block of nz
    (dz1, ez1), (dz2, ez2) = det(mu1, il_z), det(mu2, il_z)
    (dx1, ex1), (dx2, ex2) = det(mu1, il_x), det(mu2, il_x)
    tot_z = p1 * dz1 + p2 * dz2
    nz1, nz2 = nz * p1 * dz1 / tot_z, nz * p2 * dz2 / tot_z
    # X counts from the same number of pulses with basis prob (1-pz)^2 vs pz^2
    pulses = nz / (pz * pz * tot_z)
    bx = (1 - pz) ** 2
    nx1, nx2 = pulses * bx * p1 * dx1, pulses * bx * p2 * dx2
    mx1, mx2 = pulses * bx * p1 * ex1, pulses * bx * p2 * ex2
    mz1, mz2 = nz * p1 * ez1 / tot_z, nz * p2 * ez2 / tot_z
    l = math.log(21 / eps)
    def pm(nk, pk, mu, tot, sign):
        return math.exp(mu) / pk * (nk + sign * math.sqrt(tot / 2 * l))
    t0, t1 = taus(0), taus(1)
    mz = mz1 + mz2
    s0u = 2 * (t0 * math.exp(mu2) / p2 * mz2 + math.sqrt(mz / 2 * l))
    nz2m, nz1p = pm(nz2, p2, mu2, nz, -1), pm(nz1, p1, mu1, nz, +1)
    s0 = max(0.0, t0 / (mu1 - mu2) * (mu1 * nz2m - mu2 * nz1p))
    s1 = t1 * mu1 / (mu2 * (mu1 - mu2)) * (nz2m - mu2**2 / mu1**2 * nz1p - (mu1**2 - mu2**2) / mu1**2 * s0u / t0)
    nx = nx1 + nx2
    nx2m, nx1p = pm(nx2, p2, mu2, nx, -1), pm(nx1, p1, mu1, nx, +1)
    s0ux = 2 * (t0 * math.exp(mu2) / p2 * (mx2) + math.sqrt((mx1 + mx2) / 2 * l))
    sx1 = t1 * mu1 / (mu2 * (mu1 - mu2)) * (nx2m - mu2**2 / mu1**2 * nx1p - (mu1**2 - mu2**2) / mu1**2 * s0ux / t0)
    mx = mx1 + mx2
    mx1p, mx2m = pm(mx1, p1, mu1, mx, +1), pm(mx2, p2, mu2, mx, -1)
    vx1 = t1 / (mu1 - mu2) * (mx1p - mx2m)
    if s1 <= 0 or sx1 <= 0:
        return None
    b = max(vx1 / sx1, 1e-9)
    c, d = s1, sx1
    g = math.sqrt((c + d) * (1 - b) * b / (c * d * math.log(2)) * math.log2((c + d) / (c * d * (1 - b) * b) * 21**2 / eps**2))
    phi = min(b + g, 0.5)
    qber = mz / nz
    return dict(loss=loss_db, D0=s0, D1=s1, phi=phi, qber=qber)


HEADER = """# One-decoy count scenarios for a 32-dimensional time-bin setup, one
# privacy-amplification block of 1e8 sifted Z detections per row.
# Generated by gen_scenario.py (1% misalignment, 86% detector efficiency,
# 330 dark counts/s, 487 MHz, 1 dB / 3 dB receiver loss in Z / X,
# intensities 0.5 / 0.1 sent with probability 0.7 / 0.3).
q 32
eps_sec 1e-12
eps_cor 1e-12"""

if __name__ == "__main__":
    print(HEADER)
    for loss in range(0, 32, 2):
        r = model(loss)
        if r is None:
            break
        print(f"row loss_db={loss} d0={r['D0']:.6e} d1={r['D1']:.6e} phi_z={r['phi']:.6f} qber={r['qber']:.6f} n=1e8")
