//! Hand-built reference matrices, independent of the library's gate code.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use rand::Rng;

pub type M2 = [[C; 2]; 2];
pub type M4 = [[C; 4]; 4];

pub const O: C = C::new(0.0, 0.0);
pub const J: C = C::new(0.0, 1.0);

pub fn re(x: f64) -> C {
    C::new(x, 0.0)
}

pub fn sigma(n: [f64; 3]) -> M2 {
    let [x, y, z] = n;
    [[re(z), C::new(x, -y)], [C::new(x, y), re(-z)]]
}

pub fn rot(n: [f64; 3], t: f64) -> M2 {
    let s = sigma(n);
    let (sn, cs) = (t / 2.0).sin_cos();
    let mut r = [[O; 2]; 2];
    for i in 0..2 {
        for k in 0..2 {
            r[i][k] = -J * sn * s[i][k] + if i == k { re(cs) } else { O };
        }
    }
    r
}

pub fn mul2(a: &M2, b: &M2) -> M2 {
    let mut r = [[O; 2]; 2];
    for i in 0..2 {
        for k in 0..2 {
            r[i][k] = a[i][0] * b[0][k] + a[i][1] * b[1][k];
        }
    }
    r
}

pub fn kron(a: &M2, b: &M2) -> M4 {
    let mut r = [[O; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            r[i][k] = a[i >> 1][k >> 1] * b[i & 1][k & 1];
        }
    }
    r
}

pub fn mul4(a: &M4, b: &M4) -> M4 {
    let mut r = [[O; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            r[i][k] = (0..4).map(|j| a[i][j] * b[j][k]).sum();
        }
    }
    r
}

pub fn lin4(a: C, x: &M4, b: C, y: &M4) -> M4 {
    let mut r = [[O; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            r[i][k] = a * x[i][k] + b * y[i][k];
        }
    }
    r
}

pub fn apply4(m: &M4, v: &[C; 4]) -> [C; 4] {
    let mut r = [O; 4];
    for i in 0..4 {
        r[i] = (0..4).map(|j| m[i][j] * v[j]).sum();
    }
    r
}

pub fn product(t1: f64, t2: f64) -> [C; 4] {
    let (s1, c1) = t1.sin_cos();
    let (s2, c2) = t2.sin_cos();
    [re(c1 * c2), re(c1 * s2), re(s1 * c2), re(s1 * s2)]
}

/// Switch gates with the `n_x` scaling written out entry by entry.
pub struct Gates {
    pub ua1: M2,
    pub ua2: M2,
    pub ub1: M2,
    pub ub2: M2,
    pub va: M2,
    pub vb: M2,
}

pub fn gates(n: [f64; 3], np: [f64; 3], d: f64) -> Gates {
    let [nx, ny, nz] = n;
    let [a, b, c] = np;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let k = 1.0 + d;
    Gates {
        ua1: [
            [C::from_polar(1.0, -std::f64::consts::FRAC_PI_4), O],
            [O, C::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
        ],
        ua2: [[O, re(k)], [re(k), O]],
        ub1: [
            [C::new(h, -h * nz), C::new(-h * ny, -h * k * nx)],
            [C::new(h * ny, -h * k * nx), C::new(h, h * nz)],
        ],
        ub2: [[re(c), C::new(k * a, -b)], [C::new(k * a, b), re(-c)]],
        va: [[O, re(1.0)], [re(1.0), O]],
        vb: sigma(np),
    }
}

impl Gates {
    pub fn m0(&self) -> M4 {
        kron(&mul2(&self.ua2, &self.ua1), &mul2(&self.ub2, &self.ub1))
    }

    pub fn m1(&self) -> M4 {
        kron(&mul2(&self.ua1, &self.ua2), &mul2(&self.ub1, &self.ub2))
    }

    pub fn v(&self) -> M4 {
        kron(&self.va, &self.vb)
    }
}

/// Class-μ (`mu = true`) or class-ν output map `W·S·V` with ideal `W`, `V`.
pub fn branch_map(alpha: f64, theta: f64, n: [f64; 3], np: [f64; 3], d: f64, mu: bool) -> M4 {
    let ideal = gates(n, np, 0.0);
    let g = gates(n, np, d);
    let (s, c) = (theta / 2.0).sin_cos();
    let z = [0.0, 0.0, 1.0];
    let (sw, w) = if mu {
        (
            lin4(re(c), &g.m0(), J * s, &g.m1()),
            kron(
                &rot(z, alpha + std::f64::consts::FRAC_PI_2),
                &rot(n, std::f64::consts::FRAC_PI_2 - theta),
            ),
        )
    } else {
        (
            lin4(re(s), &g.m0(), -J * c, &g.m1()),
            kron(
                &rot(z, alpha - std::f64::consts::FRAC_PI_2),
                &rot(n, -std::f64::consts::FRAC_PI_2 - theta),
            ),
        )
    };
    mul4(&mul4(&w, &sw), &ideal.v())
}

pub fn overlap_fidelity(a: &[C; 4], b: &[C; 4]) -> f64 {
    let ip: C = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    ip.norm_sqr() / (na * nb)
}

pub struct RefFidelity {
    ideal: M4,
    practical: M4,
}

impl RefFidelity {
    pub fn new(alpha: f64, theta: f64, n: [f64; 3], np: [f64; 3], d: f64, mu: bool) -> Self {
        RefFidelity {
            ideal: branch_map(alpha, theta, n, np, 0.0, mu),
            practical: branch_map(alpha, theta, n, np, d, mu),
        }
    }

    pub fn at(&self, t1: f64, t2: f64) -> f64 {
        let psi = product(t1, t2);
        overlap_fidelity(&apply4(&self.ideal, &psi), &apply4(&self.practical, &psi))
    }

    /// Sample mean and standard error over uniform `(θ₁, θ₂) ∈ [0, 2π)²`.
    pub fn monte_carlo<R: Rng>(&self, rng: &mut R, samples: usize) -> (f64, f64) {
        let tau = 2.0 * std::f64::consts::PI;
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..samples {
            let f = self.at(rng.random::<f64>() * tau, rng.random::<f64>() * tau);
            sum += f;
            sq += f * f;
        }
        let n = samples as f64;
        let mean = sum / n;
        let var = (sq / n - mean * mean).max(0.0) * n / (n - 1.0);
        (mean, (var / n).sqrt())
    }
}

/// `(n, n⊥)` of the four named gates; all use `α = −π/2`, `θ = π/2`.
pub fn preset_axes(name: &str) -> ([f64; 3], [f64; 3]) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match name {
        "cnot" => ([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]),
        "cy" => ([0.0, 1.0, 0.0], [1.0, 0.0, 0.0]),
        "cz" => ([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]),
        "ch" => ([h, 0.0, h], [0.0, 1.0, 0.0]),
        _ => panic!("unknown preset {name}"),
    }
}

pub fn preset_reference(name: &str, d: f64, mu: bool) -> RefFidelity {
    let (n, np) = preset_axes(name);
    RefFidelity::new(
        -std::f64::consts::FRAC_PI_2,
        std::f64::consts::FRAC_PI_2,
        n,
        np,
        d,
        mu,
    )
}
