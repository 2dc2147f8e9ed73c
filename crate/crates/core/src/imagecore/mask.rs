// SPDX-License-Identifier: Apache-2.0

use super::ImageError;

/// One boolean per pixel, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::ZeroDimension { width, height });
        }
        if bits.len() != width * height {
            return Err(ImageError::DimensionMismatch { expected: width * height, found: bits.len() });
        }
        Ok(Self { width, height, bits })
    }

    pub fn empty(width: usize, height: usize) -> Result<Self, ImageError> {
        Self::new(width, height, vec![false; width * height])
    }

    pub fn full(width: usize, height: usize) -> Result<Self, ImageError> {
        Self::new(width, height, vec![true; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self, ImageError> {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self::new(width, height, bits)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn any(&self) -> bool {
        self.bits.iter().any(|&b| b)
    }

    fn check_shape(&self, other: &Mask) -> Result<(), ImageError> {
        if self.width != other.width || self.height != other.height {
            return Err(ImageError::DimensionMismatch { expected: self.len(), found: other.len() });
        }
        Ok(())
    }

    fn combine(&self, other: &Mask, f: impl Fn(bool, bool) -> bool) -> Result<Mask, ImageError> {
        self.check_shape(other)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect();
        Ok(Mask { width: self.width, height: self.height, bits })
    }

    pub fn and(&self, other: &Mask) -> Result<Mask, ImageError> {
        self.combine(other, |a, b| a && b)
    }

    pub fn or(&self, other: &Mask) -> Result<Mask, ImageError> {
        self.combine(other, |a, b| a || b)
    }

    pub fn and_not(&self, other: &Mask) -> Result<Mask, ImageError> {
        self.combine(other, |a, b| a && !b)
    }

    pub fn not(&self) -> Mask {
        Mask { width: self.width, height: self.height, bits: self.bits.iter().map(|b| !b).collect() }
    }

    /// Binary dilation with the 3x3 cross (4-neighbourhood), `steps` times.
    pub fn dilate4(&self, steps: usize) -> Mask {
        let mut cur = self.clone();
        for _ in 0..steps {
            let mut next = cur.clone();
            for y in 0..self.height {
                for x in 0..self.width {
                    if cur.get(x, y) {
                        continue;
                    }
                    let hit = (x > 0 && cur.get(x - 1, y))
                        || (x + 1 < self.width && cur.get(x + 1, y))
                        || (y > 0 && cur.get(x, y - 1))
                        || (y + 1 < self.height && cur.get(x, y + 1));
                    if hit {
                        next.set(x, y, true);
                    }
                }
            }
            cur = next;
        }
        cur
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = Mask::new(2, 2, vec![true, true, false, false]).unwrap();
        let b = Mask::new(2, 2, vec![true, false, true, false]).unwrap();
        assert_eq!(a.and(&b).unwrap().bits(), &[true, false, false, false]);
        assert_eq!(a.or(&b).unwrap().bits(), &[true, true, true, false]);
        assert_eq!(a.and_not(&b).unwrap().bits(), &[false, true, false, false]);
        assert_eq!(a.not().count(), 2);
        assert!(a.and(&Mask::empty(3, 1).unwrap()).is_err());
    }

    #[test]
    fn dilation_grows_a_cross() {
        let mut m = Mask::empty(5, 5).unwrap();
        m.set(2, 2, true);
        let d = m.dilate4(1);
        assert_eq!(d.count(), 5);
        assert_eq!(m.dilate4(2).count(), 13);
    }
}
