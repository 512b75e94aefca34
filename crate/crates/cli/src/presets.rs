//! Parameter sets of the four reference figures.

pub struct Preset {
    pub name: &'static str,
    pub scheme: &'static str,
    pub summary: &'static str,
    pub values: &'static [(&'static str, &'static str)],
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "paper-fig-n15",
        scheme: "tpt",
        summary: "two-photon ladder, N = 15 = 3 * 5, 23 intermediate levels",
        values: &[
            ("n", "15"),
            ("delta", "0.0225"),
            ("spacing", "0.003"),
            ("bandwidth", "0.1525"),
            ("dispersion", "-10824"),
            ("m", "11"),
            ("rabi", "1"),
            ("scan", "0:8:200"),
            ("ells", "2..7"),
            ("detector", "peak"),
            ("window", "0.25"),
            ("tau-peak", "0.55"),
        ],
    },
    Preset {
        name: "paper-fig-n21",
        scheme: "floquet",
        summary: "modulated two-level system, N = 21 = 3 * 7, even sidebands",
        values: &[
            ("n", "21"),
            ("delta", "0.063"),
            ("spacing", "0.003"),
            ("delta-n", "12.71"),
            ("kappa", "200*pi+pi/4"),
            ("phi", "pi/2"),
            ("scan", "0:8:200"),
            ("ells", "2..7"),
            ("detector", "peak"),
        ],
    },
    Preset {
        name: "paper-fig-n105",
        scheme: "floquet",
        summary: "modulated two-level system, N = 105 = 3 * 5 * 7, integer chirps",
        values: &[
            ("n", "105"),
            ("delta", "0.315"),
            ("spacing", "0.003"),
            ("delta-n", "90"),
            ("kappa", "200000*pi+pi/4"),
            ("phi", "pi/2"),
            ("ells", "2..35"),
            ("detector", "line"),
        ],
    },
    Preset {
        name: "paper-fig-n1911",
        scheme: "pulsetrain",
        summary: "train of 21 pulses, N = 1911 = 3 * 7^2 * 13",
        values: &[
            ("n", "1911"),
            ("period", "1"),
            ("pulses", "21"),
            ("omega-ge", "1"),
            ("ells", "2..44"),
            ("detector", "unit"),
        ],
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
