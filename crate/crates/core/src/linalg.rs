//! 3x3 matrix helpers over any commutative ring type.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

pub type Mat3<T> = [[T; 3]; 3];

pub fn det3<T>(a: &Mat3<T>) -> T
where
    T: Clone + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    let m = |i: usize, j: usize| a[i][j].clone();
    m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
}

/// Classical adjugate: `a * adj(a) = adj(a) * a = det(a) * I`.
pub fn adjugate3<T>(a: &Mat3<T>) -> Mat3<T>
where
    T: Clone + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T>,
{
    let m = |i: usize, j: usize| a[i][j].clone();
    let cof = |i: usize, j: usize| {
        let r: Vec<usize> = (0..3).filter(|&x| x != i).collect();
        let c: Vec<usize> = (0..3).filter(|&x| x != j).collect();
        let minor = m(r[0], c[0]) * m(r[1], c[1]) - m(r[0], c[1]) * m(r[1], c[0]);
        if (i + j).is_multiple_of(2) {
            minor
        } else {
            -minor
        }
    };
    // adj(a)[i][j] = cofactor(j, i)
    [
        [cof(0, 0), cof(1, 0), cof(2, 0)],
        [cof(0, 1), cof(1, 1), cof(2, 1)],
        [cof(0, 2), cof(1, 2), cof(2, 2)],
    ]
}

pub fn mul3<T>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T>
where
    T: Clone + Add<Output = T> + Mul<Output = T>,
{
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone() + a[i][2].clone() * b[2][j].clone()
        })
    })
}

pub fn transpose3<T: Clone>(a: &Mat3<T>) -> Mat3<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

pub fn identity3<T: Zero + One>() -> Mat3<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { T::one() } else { T::zero() }))
}

pub fn mat_vec3<T>(a: &Mat3<T>, v: &[T; 3]) -> [T; 3]
where
    T: Clone + Add<Output = T> + Mul<Output = T>,
{
    std::array::from_fn(|i| {
        a[i][0].clone() * v[0].clone() + a[i][1].clone() * v[1].clone() + a[i][2].clone() * v[2].clone()
    })
}

pub fn neg3<T: Clone + Neg<Output = T>>(a: &Mat3<T>) -> Mat3<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| -a[i][j].clone()))
}
