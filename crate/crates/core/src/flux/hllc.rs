//! HLLC flux in a face-normal frame.
//!
//! Wave speeds: Einfeldt-type bounds mixing the one-sided characteristic
//! speeds with the Roe-averaged ones; contact speed from the usual
//! momentum-jump formula.

/// Gas state resolved along the face normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasState {
    pub rho: f64,
    pub normal_velocity: f64,
    pub tangential_velocity: f64,
    pub pressure: f64,
    /// `rho E`.
    pub total_energy: f64,
}

impl GasState {
    fn conserved(&self) -> [f64; 4] {
        [
            self.rho,
            self.rho * self.normal_velocity,
            self.rho * self.tangential_velocity,
            self.total_energy,
        ]
    }

    fn flux(&self) -> [f64; 4] {
        let un = self.normal_velocity;
        [
            self.rho * un,
            self.rho * un * un + self.pressure,
            self.rho * self.tangential_velocity * un,
            (self.total_energy + self.pressure) * un,
        ]
    }

    fn enthalpy(&self) -> f64 {
        (self.total_energy + self.pressure) / self.rho
    }

    fn star_state(&self, s: f64, s_star: f64) -> [f64; 4] {
        let un = self.normal_velocity;
        let factor = self.rho * (s - un) / (s - s_star);
        let specific_energy = self.total_energy / self.rho;
        [
            factor,
            factor * s_star,
            factor * self.tangential_velocity,
            factor
                * (specific_energy
                    + (s_star - un) * (s_star + self.pressure / (self.rho * (s - un)))),
        ]
    }
}

/// Signal speeds `(S_left, S_star, S_right)`.
pub fn wave_speeds(left: &GasState, right: &GasState, gamma: f64) -> (f64, f64, f64) {
    let cl = (gamma * left.pressure / left.rho).sqrt();
    let cr = (gamma * right.pressure / right.rho).sqrt();
    let sl = left.rho.sqrt();
    let sr = right.rho.sqrt();
    let wsum = sl + sr;
    let u = (sl * left.normal_velocity + sr * right.normal_velocity) / wsum;
    let v = (sl * left.tangential_velocity + sr * right.tangential_velocity) / wsum;
    let h = (sl * left.enthalpy() + sr * right.enthalpy()) / wsum;
    let c = ((gamma - 1.0) * (h - 0.5 * (u * u + v * v))).max(0.0).sqrt();

    let s_left = (left.normal_velocity - cl).min(u - c);
    let s_right = (right.normal_velocity + cr).max(u + c);

    let ml = left.rho * (s_left - left.normal_velocity);
    let mr = right.rho * (s_right - right.normal_velocity);
    let s_star = (right.pressure - left.pressure + ml * left.normal_velocity
        - mr * right.normal_velocity)
        / (ml - mr);
    (s_left, s_star, s_right)
}

/// Flux components ordered (mass, normal momentum, tangential momentum,
/// energy).
pub fn hllc_normal_flux(left: &GasState, right: &GasState, gamma: f64) -> [f64; 4] {
    let (s_left, s_star, s_right) = wave_speeds(left, right, gamma);
    if 0.0 <= s_left {
        return left.flux();
    }
    if s_right <= 0.0 {
        return right.flux();
    }
    let (state, s) = if 0.0 <= s_star { (left, s_left) } else { (right, s_right) };
    let f = state.flux();
    let w = state.conserved();
    let star = state.star_state(s, s_star);
    std::array::from_fn(|i| f[i] + s * (star[i] - w[i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas(rho: f64, u: f64, p: f64) -> GasState {
        GasState {
            rho,
            normal_velocity: u,
            tangential_velocity: 0.0,
            pressure: p,
            total_energy: p / 0.4 + 0.5 * rho * u * u,
        }
    }

    #[test]
    fn identical_states_give_physical_flux() {
        let g = gas(0.8, 0.3, 1.7);
        let f = hllc_normal_flux(&g, &g, 1.4);
        let exact = g.flux();
        for i in 0..4 {
            assert!((f[i] - exact[i]).abs() <= 1e-13 * (1.0 + exact[i].abs()));
        }
    }

    #[test]
    fn star_states_are_consistent_across_contact() {
        let l = gas(1.0, 0.0, 1.0);
        let r = gas(0.125, 0.0, 0.1);
        let (sl, ss, sr) = wave_speeds(&l, &r, 1.4);
        assert!(sl < ss && ss < sr);
        let fl = l.flux();
        let fr = r.flux();
        let wl = l.conserved();
        let wr = r.conserved();
        let sl_star = l.star_state(sl, ss);
        let sr_star = r.star_state(sr, ss);
        // F*_L - F*_R = S* (W*_L - W*_R) when both sides share p*.
        for i in 0..4 {
            let f_star_l = fl[i] + sl * (sl_star[i] - wl[i]);
            let f_star_r = fr[i] + sr * (sr_star[i] - wr[i]);
            let rhs = ss * (sl_star[i] - sr_star[i]);
            assert!((f_star_l - f_star_r - rhs).abs() < 1e-12, "component {i}");
        }
    }
}
