"""Compiled scalar kernels shared by the public modules.

Everything here works on plain floats and float64 arrays so that the same
code path serves single evaluations from Python and the inner loops of the
kinematic and 6-DOF simulators.  Errors are reported through integer status
codes; the public wrappers translate them into exceptions or run statuses.
"""

import math

import numpy as np
from numba import njit

PI = math.pi
HALF_PI = 0.5 * math.pi
TWO_PI = 2.0 * math.pi

# minimum line-of-sight range before the geometry is considered degenerate
R_MIN = 1e-6

ST_OK = 0
ST_DEGENERATE = 1
ST_RANGE = 2

RUN_CONVERGED = 0
RUN_TIMEOUT = 1
RUN_DIVERGED = 2
RUN_DEGENERATE = 3

# trajectory record layout (see results.TRAJECTORY_COLUMNS)
C_T, C_X, C_Y, C_Z, C_VX, C_VY, C_VZ = 0, 1, 2, 3, 4, 5, 6
C_PHI, C_THETA, C_PSI = 7, 8, 9
C_GAMMA, C_CHI = 10, 11
C_ALPHA = 12  # alpha1..alpha4 -> 12..15
C_BETA = 16  # beta1..beta4 -> 16..19
C_SG, C_SC, C_DX, C_DZ, C_W, C_WDOT = 20, 21, 22, 23, 24, 25
N_COLS = 26

# 6-DOF state layout: position, velocity, Euler angles, Euler angle rates
S_POS, S_VEL, S_ATT, S_ATTD = 0, 3, 6, 9


@njit(cache=True)
def sgn(v):
    if v > 0.0:
        return 1.0
    if v < 0.0:
        return -1.0
    return 0.0


@njit(cache=True)
def wrap_pi(a):
    """Reduce an angle to [-pi, pi)."""
    w = (a + PI) % TWO_PI - PI
    if w >= PI:
        w -= TWO_PI
    return w


@njit(cache=True)
def bearings_into(px, py, pz, verts, alpha, beta, rng):
    for i in range(4):
        dx = verts[i, 0] - px
        dy = verts[i, 1] - py
        dz = verts[i, 2] - pz
        rxy = math.sqrt(dx * dx + dy * dy)
        r = math.sqrt(rxy * rxy + dz * dz)
        if r < R_MIN:
            return ST_DEGENERATE
        rng[i] = r
        # atan2 form of arcsin(Rz/R); better conditioned near +-pi/2
        alpha[i] = math.atan2(dz, rxy)
        beta[i] = math.atan2(dy, dx)
        if beta[i] < 0.0:
            return ST_RANGE
    return ST_OK


@njit(cache=True)
def shaping_gamma(b):
    if b <= 0.0:
        d = b + HALF_PI
    else:
        d = b - HALF_PI
    return sgn(b) * math.sqrt(abs(PI * PI - 4.0 * d * d)) / 4.0


@njit(cache=True)
def shaping_chi(b1, b2):
    s = b1 + b2
    return sgn(0.5 * s - HALF_PI) * math.sqrt(abs(PI * PI - s * s)) / 4.0


@njit(cache=True)
def gamma_from_elevations(a1, a4):
    """Return (gamma_des, pre-branch sum u, S_gamma)."""
    b = 0.5 * (a1 + a4)
    sg = shaping_gamma(b)
    u = b + sg
    if u > HALF_PI:
        g = PI - u
    elif u < -HALF_PI:
        g = -(PI + u)
    else:
        g = u
    return g, u, sg


@njit(cache=True)
def chi_from_azimuths(b1, b2, u):
    """Return (chi_des, S_chi) given the flight-path pre-branch sum u."""
    sc = shaping_chi(b1, b2)
    h = 0.5 * (b1 + b2) + sc
    if u > HALF_PI or u < -HALF_PI:
        h = -h
    return wrap_pi(h), sc


@njit(cache=True)
def guidance_eval(alpha, beta, alternate):
    """Guidance angles from a full bearing set.

    ``alternate`` selects the E2/E3 elevation and E4/E3 azimuth pairing
    instead of E1/E4 and E1/E2.
    """
    if alternate:
        g, u, sg = gamma_from_elevations(alpha[1], alpha[2])
        c, sc = chi_from_azimuths(beta[3], beta[2], u)
    else:
        g, u, sg = gamma_from_elevations(alpha[0], alpha[3])
        c, sc = chi_from_azimuths(beta[0], beta[1], u)
    return g, c, sg, sc


@njit(cache=True)
def traversal_met(beta, tol, alternate):
    if alternate:
        return abs(beta[3] - PI) <= tol and abs(beta[2]) <= tol
    return abs(beta[0] - PI) <= tol and abs(beta[1]) <= tol


@njit(cache=True)
def relative_velocity(v, gamma, chi, alpha, beta):
    cg = math.cos(gamma)
    sgm = math.sin(gamma)
    ca = math.cos(alpha)
    sa = math.sin(alpha)
    vr = -v * (cg * ca * math.cos(chi - beta) + sgm * sa)
    va = -v * (-cg * sa * math.cos(chi - beta) + sgm * ca)
    vb = -v * cg * math.sin(chi - beta)
    return vr, va, vb


@njit(cache=True)
def displacement_bearing_form(alpha, beta, rng):
    dx = -0.5 * (rng[0] * math.cos(alpha[0]) * math.cos(beta[0])
                 + rng[1] * math.cos(alpha[1]) * math.cos(beta[1]))
    dz = -0.5 * (rng[0] * math.sin(alpha[0]) + rng[3] * math.sin(alpha[3]))
    return dx, dz


@njit(cache=True)
def displacements_many(points, verts):
    """Bearing-form (D_x, D_z) for each row of ``points``; NaN where degenerate."""
    n = points.shape[0]
    out = np.empty((n, 2))
    alpha = np.empty(4)
    beta = np.empty(4)
    rng = np.empty(4)
    for k in range(n):
        st = bearings_into(points[k, 0], points[k, 1], points[k, 2], verts, alpha, beta, rng)
        if st != ST_OK:
            out[k, 0] = np.nan
            out[k, 1] = np.nan
            continue
        dx, dz = displacement_bearing_form(alpha, beta, rng)
        out[k, 0] = dx
        out[k, 1] = dz
    return out


@njit(cache=True)
def guidance_many(points, verts, alternate):
    """(gamma_des, chi_des, D_x, D_z) for each row of ``points``."""
    n = points.shape[0]
    out = np.empty((n, 4))
    alpha = np.empty(4)
    beta = np.empty(4)
    rng = np.empty(4)
    for k in range(n):
        st = bearings_into(points[k, 0], points[k, 1], points[k, 2], verts, alpha, beta, rng)
        if st != ST_OK:
            out[k, :] = np.nan
            continue
        g, c, sg, sc = guidance_eval(alpha, beta, alternate)
        dx, dz = displacement_bearing_form(alpha, beta, rng)
        out[k, 0] = g
        out[k, 1] = c
        out[k, 2] = dx
        out[k, 3] = dz
    return out


@njit(cache=True)
def _record_geometry(row, alpha, beta, rng, g, c, sg, sc, speed):
    for i in range(4):
        row[C_ALPHA + i] = alpha[i]
        row[C_BETA + i] = beta[i]
    row[C_GAMMA] = g
    row[C_CHI] = c
    row[C_SG] = sg
    row[C_SC] = sc
    dx, dz = displacement_bearing_form(alpha, beta, rng)
    row[C_DX] = dx
    row[C_DZ] = dz
    row[C_W] = 0.5 * (dx * dx + dz * dz)
    row[C_WDOT] = dx * speed * math.cos(g) * math.cos(c) + dz * speed * math.sin(g)


# ---------------------------------------------------------------------------
# point-mass kinematics


@njit(cache=True)
def _kin_velocity(px, py, pz, verts, speed, latched, alternate, alpha, beta, rng):
    """Commanded velocity at a position.  Returns (vx, vy, vz, status)."""
    if latched or py >= verts[0, 1]:
        return 0.0, speed, 0.0, ST_OK
    st = bearings_into(px, py, pz, verts, alpha, beta, rng)
    if st != ST_OK:
        return 0.0, 0.0, 0.0, st
    g, c, sg, sc = guidance_eval(alpha, beta, alternate)
    cg = math.cos(g)
    return speed * cg * math.cos(c), speed * cg * math.sin(c), speed * math.sin(g), ST_OK


@njit(cache=True)
def run_kinematic(start, verts, speed, tol, dt, n_max, alternate, use_latch):
    """Integrate the point-mass model under ideal command following (RK4).

    Returns (trace, n_rows, status, latch_row, crossing[3], t_cross).
    The final row, when the window plane is crossed, is the interpolated
    crossing sample.
    """
    trace = np.zeros((n_max + 1, N_COLS))
    alpha = np.empty(4)
    beta = np.empty(4)
    rng = np.empty(4)
    sa = np.empty(4)
    sb = np.empty(4)
    sr = np.empty(4)
    y_plane = verts[0, 1]
    px, py, pz = start[0], start[1], start[2]
    t = 0.0
    latched = False
    latch_row = -1
    crossing = np.full(3, np.nan)
    t_cross = np.nan
    h2 = 0.5 * dt
    for k in range(n_max):
        st = bearings_into(px, py, pz, verts, alpha, beta, rng)
        if st != ST_OK:
            return trace, k, RUN_DEGENERATE, latch_row, crossing, t_cross
        if use_latch and not latched and traversal_met(beta, tol, alternate):
            latched = True
            latch_row = k
        if latched:
            g, c = 0.0, HALF_PI
            sg = shaping_gamma(0.5 * (alpha[0] + alpha[3]))
            sc = shaping_chi(beta[0], beta[1])
        else:
            g, c, sg, sc = guidance_eval(alpha, beta, alternate)
        row = trace[k]
        row[C_T] = t
        row[C_X] = px
        row[C_Y] = py
        row[C_Z] = pz
        cg = math.cos(g)
        row[C_VX] = speed * cg * math.cos(c)
        row[C_VY] = speed * cg * math.sin(c)
        row[C_VZ] = speed * math.sin(g)
        _record_geometry(row, alpha, beta, rng, g, c, sg, sc, speed)

        k1x, k1y, k1z = row[C_VX], row[C_VY], row[C_VZ]
        k2x, k2y, k2z, s2 = _kin_velocity(px + h2 * k1x, py + h2 * k1y, pz + h2 * k1z,
                                          verts, speed, latched, alternate, sa, sb, sr)
        k3x, k3y, k3z, s3 = _kin_velocity(px + h2 * k2x, py + h2 * k2y, pz + h2 * k2z,
                                          verts, speed, latched, alternate, sa, sb, sr)
        k4x, k4y, k4z, s4 = _kin_velocity(px + dt * k3x, py + dt * k3y, pz + dt * k3z,
                                          verts, speed, latched, alternate, sa, sb, sr)
        if s2 != ST_OK or s3 != ST_OK or s4 != ST_OK:
            return trace, k + 1, RUN_DEGENERATE, latch_row, crossing, t_cross
        nx = px + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        ny = py + dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        nz = pz + dt / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
        if ny >= y_plane:
            s = (y_plane - py) / (ny - py)
            crossing[0] = px + s * (nx - px)
            crossing[1] = y_plane
            crossing[2] = pz + s * (nz - pz)
            t_cross = t + s * dt
            row = trace[k + 1]
            row[C_T] = t_cross
            row[C_X] = crossing[0]
            row[C_Y] = y_plane
            row[C_Z] = crossing[2]
            row[C_VX] = (nx - px) / dt
            row[C_VY] = (ny - py) / dt
            row[C_VZ] = (nz - pz) / dt
            st = bearings_into(crossing[0], y_plane, crossing[2], verts, alpha, beta, rng)
            if st == ST_OK:
                _record_geometry(row, alpha, beta, rng, 0.0, HALF_PI,
                                 shaping_gamma(0.5 * (alpha[0] + alpha[3])),
                                 shaping_chi(beta[0], beta[1]), speed)
            else:
                for j in range(C_ALPHA, N_COLS):
                    row[j] = np.nan
                row[C_GAMMA] = 0.0
                row[C_CHI] = HALF_PI
            return trace, k + 2, RUN_CONVERGED, latch_row, crossing, t_cross
        px, py, pz = nx, ny, nz
        t = (k + 1) * dt
    return trace, n_max, RUN_TIMEOUT, latch_row, crossing, t_cross


# ---------------------------------------------------------------------------
# 6-DOF rigid body


@njit(cache=True)
def euler_rates_to_body(phi, theta, dphi, dtheta, dpsi):
    sphi = math.sin(phi)
    cphi = math.cos(phi)
    sth = math.sin(theta)
    cth = math.cos(theta)
    p = dphi - sth * dpsi
    q = cphi * dtheta + sphi * cth * dpsi
    r = -sphi * dtheta + cphi * cth * dpsi
    return p, q, r


@njit(cache=True)
def body_to_euler_rates(phi, theta, p, q, r):
    sphi = math.sin(phi)
    cphi = math.cos(phi)
    cth = math.cos(theta)
    tth = math.tan(theta)
    dphi = p + sphi * tth * q + cphi * tth * r
    dtheta = cphi * q - sphi * r
    dpsi = (sphi * q + cphi * r) / cth
    return dphi, dtheta, dpsi


@njit(cache=True)
def rigid_body_deriv(s, u1, u2, u3, u4, params, out):
    """params = (m, Jxx, Jyy, Jzz, g)."""
    m = params[0]
    phi = s[S_ATT]
    theta = s[S_ATT + 1]
    psi = s[S_ATT + 2]
    cphi = math.cos(phi)
    sphi = math.sin(phi)
    cth = math.cos(theta)
    sth = math.sin(theta)
    cpsi = math.cos(psi)
    spsi = math.sin(psi)
    out[0] = s[S_VEL]
    out[1] = s[S_VEL + 1]
    out[2] = s[S_VEL + 2]
    out[3] = u1 * (cphi * sth * cpsi + sphi * spsi) / m
    out[4] = u1 * (cphi * sth * spsi - sphi * cpsi) / m
    out[5] = u1 * cphi * cth / m - params[4]
    out[6] = s[S_ATTD]
    out[7] = s[S_ATTD + 1]
    out[8] = s[S_ATTD + 2]
    out[9] = u2 / params[1]
    out[10] = u3 / params[2]
    out[11] = u4 / params[3]


@njit(cache=True)
def rk4_rigid_body(s, u1, u2, u3, u4, params, dt, k1, k2, k3, k4, tmp):
    rigid_body_deriv(s, u1, u2, u3, u4, params, k1)
    for i in range(12):
        tmp[i] = s[i] + 0.5 * dt * k1[i]
    rigid_body_deriv(tmp, u1, u2, u3, u4, params, k2)
    for i in range(12):
        tmp[i] = s[i] + 0.5 * dt * k2[i]
    rigid_body_deriv(tmp, u1, u2, u3, u4, params, k3)
    for i in range(12):
        tmp[i] = s[i] + dt * k3[i]
    rigid_body_deriv(tmp, u1, u2, u3, u4, params, k4)
    for i in range(12):
        s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])


@njit(cache=True)
def position_control(s, des_pos, des_vel, gains, params, tilt_limit, psi_cmd):
    """Outer loop.  Returns (u1, phi_c, theta_c, psi_c).

    gains layout: see sixdof.ControllerGains.as_array.
    """
    m = params[0]
    g = params[4]
    kpz, kdz = gains[0], gains[1]
    kpjx, kdjx, kpjy, kdjy = gains[6], gains[7], gains[8], gains[9]
    ax = kdjx * (des_vel[0] - s[S_VEL]) + kpjx * (des_pos[0] - s[S_POS])
    ay = kdjy * (des_vel[1] - s[S_VEL + 1]) + kpjy * (des_pos[1] - s[S_POS + 1])
    u1 = m * (g + kdz * (des_vel[2] - s[S_VEL + 2]) + kpz * (des_pos[2] - s[S_POS + 2]))
    if u1 < 0.0:
        u1 = 0.0
    psi = s[S_ATT + 2]
    theta_c = (ax * math.cos(psi) + ay * math.sin(psi)) / g
    phi_c = (ax * math.sin(psi) - ay * math.cos(psi)) / g
    theta_c = min(max(theta_c, -tilt_limit), tilt_limit)
    phi_c = min(max(phi_c, -tilt_limit), tilt_limit)
    return u1, phi_c, theta_c, psi_cmd


@njit(cache=True)
def attitude_control(s, phi_c, theta_c, psi_c, p_c, q_c, r_c, gains):
    kpphi, kdphi = gains[10], gains[11]
    kpth, kdth = gains[12], gains[13]
    kppsi, kdpsi = gains[14], gains[15]
    phi = s[S_ATT]
    theta = s[S_ATT + 1]
    psi = s[S_ATT + 2]
    p, q, r = euler_rates_to_body(phi, theta, s[S_ATTD], s[S_ATTD + 1], s[S_ATTD + 2])
    u2 = kdphi * (p_c - p) + kpphi * (phi_c - phi)
    u3 = kdth * (q_c - q) + kpth * (theta_c - theta)
    u4 = kdpsi * (r_c - r) + kppsi * (psi_c - psi)
    return u2, u3, u4


@njit(cache=True)
def run_sixdof(state0, verts, speed, tol, dt, n_max, alternate, gains, params,
               tilt_limit, diverge_tilt, sigma, noise):
    """Closed-loop guidance + cascaded PD + rigid-body RK4 with zero-order hold.

    ``noise`` holds standard-normal draws, one row of 8 per step (alpha1..4,
    beta1..4); it is ignored when ``sigma`` is zero.

    Returns (trace, n_rows, status, latch_row, crossing[3], t_cross,
    max_tilt_cmd, desired) where ``desired`` holds the desired position used
    by the controller at each step.
    """
    trace = np.zeros((n_max + 1, N_COLS))
    desired = np.zeros((n_max + 1, 3))
    s = state0.copy()
    k1 = np.empty(12)
    k2 = np.empty(12)
    k3 = np.empty(12)
    k4 = np.empty(12)
    tmp = np.empty(12)
    alpha = np.empty(4)
    beta = np.empty(4)
    rng = np.empty(4)
    am = np.empty(4)
    bm = np.empty(4)
    des_pos = np.empty(3)
    des_vel = np.empty(3)
    for i in range(3):
        des_pos[i] = s[S_POS + i]
    y_plane = verts[0, 1]
    latched = False
    latch_row = -1
    crossing = np.full(3, np.nan)
    t_cross = np.nan
    prev_phi_c = 0.0
    prev_theta_c = 0.0
    prev_psi_c = 0.0
    max_tilt_cmd = 0.0
    use_noise = sigma > 0.0
    t = 0.0
    for k in range(n_max):
        st = bearings_into(s[0], s[1], s[2], verts, alpha, beta, rng)
        if st != ST_OK:
            return trace, k, RUN_DEGENERATE, latch_row, crossing, t_cross, max_tilt_cmd, desired
        if use_noise:
            for i in range(4):
                a = alpha[i] + sigma * noise[k, i]
                am[i] = min(max(a, -HALF_PI), HALF_PI)
                b = beta[i] + sigma * noise[k, 4 + i]
                bm[i] = min(max(b, 0.0), PI)
        else:
            for i in range(4):
                am[i] = alpha[i]
                bm[i] = beta[i]
        if not latched and traversal_met(bm, tol, alternate):
            latched = True
            latch_row = k
        if latched:
            g, c = 0.0, HALF_PI
            sg = shaping_gamma(0.5 * (am[0] + am[3]))
            sc = shaping_chi(bm[0], bm[1])
        else:
            g, c, sg, sc = guidance_eval(am, bm, alternate)
        cg = math.cos(g)
        des_vel[0] = speed * cg * math.cos(c)
        des_vel[1] = speed * cg * math.sin(c)
        des_vel[2] = speed * math.sin(g)

        u1, phi_c, theta_c, psi_c = position_control(s, des_pos, des_vel, gains, params,
                                                     tilt_limit, 0.0)
        if k == 0:
            prev_phi_c, prev_theta_c, prev_psi_c = phi_c, theta_c, psi_c
        p_c, q_c, r_c = euler_rates_to_body(phi_c, theta_c, (phi_c - prev_phi_c) / dt,
                                            (theta_c - prev_theta_c) / dt,
                                            (psi_c - prev_psi_c) / dt)
        prev_phi_c, prev_theta_c, prev_psi_c = phi_c, theta_c, psi_c
        max_tilt_cmd = max(max_tilt_cmd, abs(phi_c), abs(theta_c))
        u2, u3, u4 = attitude_control(s, phi_c, theta_c, psi_c, p_c, q_c, r_c, gains)

        row = trace[k]
        row[C_T] = t
        for i in range(3):
            desired[k, i] = des_pos[i]
            row[C_X + i] = s[S_POS + i]
            row[C_VX + i] = s[S_VEL + i]
            row[C_PHI + i] = s[S_ATT + i]
        _record_geometry(row, alpha, beta, rng, g, c, sg, sc, speed)

        py = s[1]
        px = s[0]
        pz = s[2]
        rk4_rigid_body(s, u1, u2, u3, u4, params, dt, k1, k2, k3, k4, tmp)
        for i in range(3):
            des_pos[i] += dt * des_vel[i]
        t = (k + 1) * dt

        bad = False
        for i in range(12):
            if not math.isfinite(s[i]):
                bad = True
        if bad or abs(s[S_ATT]) > diverge_tilt or abs(s[S_ATT + 1]) > diverge_tilt:
            return trace, k + 1, RUN_DIVERGED, latch_row, crossing, t_cross, max_tilt_cmd, desired

        if s[1] >= y_plane:
            f = (y_plane - py) / (s[1] - py)
            crossing[0] = px + f * (s[0] - px)
            crossing[1] = y_plane
            crossing[2] = pz + f * (s[2] - pz)
            t_cross = t - dt + f * dt
            row = trace[k + 1]
            row[C_T] = t_cross
            row[C_X] = crossing[0]
            row[C_Y] = y_plane
            row[C_Z] = crossing[2]
            for i in range(3):
                desired[k + 1, i] = des_pos[i]
                row[C_VX + i] = s[S_VEL + i]
                row[C_PHI + i] = s[S_ATT + i]
            st = bearings_into(crossing[0], y_plane, crossing[2], verts, alpha, beta, rng)
            if st == ST_OK:
                _record_geometry(row, alpha, beta, rng, 0.0, HALF_PI,
                                 shaping_gamma(0.5 * (alpha[0] + alpha[3])),
                                 shaping_chi(beta[0], beta[1]), speed)
            else:
                for j in range(C_ALPHA, N_COLS):
                    row[j] = np.nan
                row[C_GAMMA] = 0.0
                row[C_CHI] = HALF_PI
            return trace, k + 2, RUN_CONVERGED, latch_row, crossing, t_cross, max_tilt_cmd, desired
    return trace, n_max, RUN_TIMEOUT, latch_row, crossing, t_cross, max_tilt_cmd, desired
