//! SVG plots of a type's line family.
//!
//! The horizontal axis is `t = 2^a`; every suffix line `(2^p t - b)/3^q`
//! is drawn over `[0, T]` and labeled with its trace position. All
//! coordinates are computed as exact rationals and only rounded when
//! written out.

use std::fmt::Write as _;

use collatz_perm::affine::{pow3, AffineForm};
use collatz_perm::collatz::pow2;
use collatz_perm::geometry::max_intersection_abscissa;
use collatz_perm::{suffix_lines, Error, Rational, TraceType};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{CliError, CliResult};

/// Largest witness exponent accepted for plotting.
pub const MAX_PLOT_EXPONENT: u64 = 1024;

const WIDTH: i64 = 800;
const HEIGHT: i64 = 600;
const LEFT: i64 = 60;
const RIGHT: i64 = 740;
const TOP: i64 = 40;
const BOTTOM: i64 = 560;

#[derive(Debug, Clone)]
pub struct PlotLine {
    /// 1-based trace position.
    pub position: usize,
    pub form: AffineForm,
    pub y_start: BigRational,
    pub y_end: BigRational,
}

#[derive(Debug, Clone)]
pub struct Figure {
    pub sigma: TraceType,
    pub x_max: Option<Rational>,
    pub t_max: BigRational,
    pub lines: Vec<PlotLine>,
    /// Requested exponents with their abscissa `2^a`.
    pub witnesses: Vec<(u64, BigRational)>,
    y_min: BigRational,
    y_max: BigRational,
}

fn rat(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

fn value_at(form: &AffineForm, t: &BigRational) -> BigRational {
    let slope = rat(BigInt::from(pow2(form.p as u64)));
    let b = rat(BigInt::from(form.b.clone()));
    (slope * t - b) / rat(BigInt::from(pow3(form.q)))
}

impl Figure {
    pub fn new(sigma: &TraceType, witnesses: &[u64]) -> CliResult<Self> {
        if let Some(&a) = witnesses.iter().find(|&&a| a > MAX_PLOT_EXPONENT) {
            return Err(CliError::usage(format!(
                "witness {a} exceeds the plotting limit {MAX_PLOT_EXPONENT}"
            )));
        }
        let family = suffix_lines(sigma);
        let x_max = match max_intersection_abscissa(&family) {
            Ok(x) => Some(x),
            Err(Error::FamilyTooSmall) => None,
            Err(e) => return Err(e.into()),
        };

        let mut t_max = BigRational::zero();
        if let Some(x) = &x_max {
            t_max = x.inner() * BigRational::new(6.into(), 5.into());
        }
        if let Some(&a) = witnesses.iter().min() {
            let w = rat(BigInt::from(pow2(a))) * BigRational::new(11.into(), 10.into());
            if w > t_max {
                t_max = w;
            }
        }
        if !t_max.is_positive() {
            t_max = BigRational::one();
        }

        let zero = BigRational::zero();
        let lines: Vec<PlotLine> = family
            .lines()
            .iter()
            .enumerate()
            .map(|(i, form)| PlotLine {
                position: i + 1,
                form: form.clone(),
                y_start: value_at(form, &zero),
                y_end: value_at(form, &t_max),
            })
            .collect();
        let ys = lines.iter().flat_map(|l| [&l.y_start, &l.y_end]);
        let y_min = ys.clone().min().cloned().unwrap_or_else(BigRational::zero);
        let mut y_max = ys.max().cloned().unwrap_or_else(BigRational::one);
        if y_max <= y_min {
            y_max = &y_min + BigRational::one();
        }

        let mut ws: Vec<(u64, BigRational)> = witnesses
            .iter()
            .map(|&a| (a, rat(BigInt::from(pow2(a)))))
            .collect();
        ws.sort_by_key(|w| w.0);
        ws.dedup_by_key(|w| w.0);

        Ok(Figure {
            sigma: sigma.clone(),
            x_max,
            t_max,
            lines,
            witnesses: ws,
            y_min,
            y_max,
        })
    }

    fn px(&self, t: &BigRational) -> BigRational {
        rat(LEFT.into()) + rat((RIGHT - LEFT).into()) * t / &self.t_max
    }

    fn py(&self, y: &BigRational) -> BigRational {
        let span = &self.y_max - &self.y_min;
        rat(BOTTOM.into()) - rat((BOTTOM - TOP).into()) * (y - &self.y_min) / span
    }

    /// Witnesses that fall inside the plotted range.
    pub fn visible_witnesses(&self) -> impl Iterator<Item = &(u64, BigRational)> {
        self.witnesses.iter().filter(|(_, t)| *t <= self.t_max)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        )
        .unwrap();
        let name = if self.sigma.is_empty() {
            "-".to_string()
        } else {
            self.sigma.to_string()
        };
        writeln!(s, "<title>line family of type {name}</title>").unwrap();
        let xm = match &self.x_max {
            Some(x) => format!("{x}"),
            None => "none".into(),
        };
        writeln!(
            s,
            "<desc>t from 0 to {}; y from {} to {}; x_max {xm}</desc>",
            fixed6(&self.t_max),
            fixed6(&self.y_min),
            fixed6(&self.y_max)
        )
        .unwrap();
        writeln!(
            s,
            r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            RIGHT - LEFT,
            BOTTOM - TOP
        )
        .unwrap();
        let zero = BigRational::zero();
        if self.y_min < zero && self.y_max > zero {
            let y0 = fixed6(&self.py(&zero));
            writeln!(
                s,
                r##"<line class="axis" x1="{LEFT}" y1="{y0}" x2="{RIGHT}" y2="{y0}" stroke="#999999"/>"##
            )
            .unwrap();
        }
        writeln!(
            s,
            r#"<text x="{RIGHT}" y="{}" text-anchor="end" font-size="12">t = {}</text>"#,
            BOTTOM + 20,
            fixed6(&self.t_max)
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{LEFT}" y="{}" font-size="12">0</text>"#,
            BOTTOM + 20
        )
        .unwrap();

        for line in &self.lines {
            let (x0, y0) = (fixed6(&self.px(&zero)), fixed6(&self.py(&line.y_start)));
            let (x1, y1) = (fixed6(&self.px(&self.t_max)), fixed6(&self.py(&line.y_end)));
            writeln!(
                s,
                r#"<polyline class="line" data-position="{}" data-form="{}" points="{x0},{y0} {x1},{y1}" fill="none" stroke="black"/>"#,
                line.position, line.form
            )
            .unwrap();
            writeln!(
                s,
                r#"<text class="label" x="{}" y="{y1}" font-size="12">{}</text>"#,
                fixed6(&(self.px(&self.t_max) + rat(4.into()))),
                line.position
            )
            .unwrap();
        }

        for (a, t) in self.visible_witnesses() {
            let x = fixed6(&self.px(t));
            writeln!(
                s,
                r##"<line class="witness" data-a="{a}" x1="{x}" y1="{TOP}" x2="{x}" y2="{BOTTOM}" stroke="#cc0000" stroke-dasharray="6,4"/>"##
            )
            .unwrap();
            writeln!(
                s,
                r#"<text x="{x}" y="{}" text-anchor="middle" font-size="12">2^{a}</text>"#,
                TOP - 6
            )
            .unwrap();
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Decimal rendering with exactly six fractional digits, rounded half away
/// from zero.
pub fn fixed6(r: &BigRational) -> String {
    let scaled = (r * rat(BigInt::from(1_000_000u32))).round().to_integer();
    let neg = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let digits = format!("{digits:0>7}");
    let (int, frac) = digits.split_at(digits.len() - 6);
    format!("{}{int}.{frac}", if neg { "-" } else { "" })
}
