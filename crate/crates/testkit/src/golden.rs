//! Identifiers published in print, with the hyperlinks printed next to them.

pub struct Golden {
    pub label: &'static str,
    pub id: &'static str,
    /// The printed hyperlink, byte for byte.
    pub href: Option<&'static str>,
}

pub const BROWSE: &str = "https://archive.softwareheritage.org/";

pub const CORPUS: &[Golden] = &[
    Golden {
        label: "parmap revision",
        id: "swh:1:rev:0064fbd0ad69de205ea6ec6999f3d3895e9442c2;origin=https://gitorious.org/parmap/parmap.git",
        href: Some("https://archive.softwareheritage.org/swh:1:rev:0064fbd0ad69de205ea6ec6999f3d3895e9442c2;origin=https://gitorious.org/parmap/parmap.git"),
    },
    Golden {
        label: "parmap code fragment",
        id: "swh:1:cnt:d5214ff9562a1fe78db51944506ba48c20de3379;origin=https://gitorious.org/parmap/parmap.git;lines=101-143",
        href: Some("https://archive.softwareheritage.org/swh:1:cnt:d5214ff9562a1fe78db51944506ba48c20de3379;origin=https://gitorious.org/parmap/parmap.git;lines=101-143"),
    },
    Golden {
        label: "swh.model revision",
        id: "swh:1:rev:6cab1cc81118877e2105c32b08653509475f3eaa;origin=https://pypi.org/project/swh.model/",
        href: None,
    },
    Golden {
        label: "GPL3 text",
        id: "swh:1:cnt:94a9ed024d3859793618152ea559a168bbcbb5e2",
        href: Some("https://archive.softwareheritage.org/swh:1:cnt:94a9ed024d3859793618152ea559a168bbcbb5e2"),
    },
    Golden {
        label: "Darktable source tree",
        id: "swh:1:dir:d198bc9d7a6bcf6db04f476d29314f157507d505",
        href: Some("https://archive.softwareheritage.org/swh:1:dir:d198bc9d7a6bcf6db04f476d29314f157507d505"),
    },
    Golden {
        label: "Darktable commit",
        id: "swh:1:rev:309cf2674ee7a0749978cf8265ab91a60aea0f7d",
        href: Some("https://archive.softwareheritage.org/swh:1:rev:309cf2674ee7a0749978cf8265ab91a60aea0f7d"),
    },
    Golden {
        label: "Darktable release",
        id: "swh:1:rel:22ece559cc7cc2364edc5e5593d63ae8bd229f9f",
        href: Some("https://archive.softwareheritage.org/swh:1:rel:22ece559cc7cc2364edc5e5593d63ae8bd229f9f"),
    },
    Golden {
        label: "Darktable snapshot",
        id: "swh:1:snp:c7c108084bc0bf3d81436bf980b46e98bd338453",
        href: Some("https://archive.softwareheritage.org/swh:1:snp:c7c108084bc0bf3d81436bf980b46e98bd338453"),
    },
    Golden {
        label: "Quake III source tree",
        id: "swh:1:dir:c6f07c2173a458d098de45d4c459a8f1916d900f;origin=https://github.com/id-Software/Quake-III-Arena/",
        href: Some("https://archive.softwareheritage.org/swh:1:dir:c6f07c2173a458d098de45d4c459a8f1916d900f;origin=https://github.com/id-Software/Quake-III-Arena/"),
    },
    // The printed link carries the browse page's trailing slash.
    Golden {
        label: "Apollo 11 fragment",
        id: "swh:1:cnt:41ddb23118f92d7218099a5e7a990cf58f1d07fa;origin=https://github.com/chrislgarry/Apollo-11;lines=64-72",
        href: Some("https://archive.softwareheritage.org/swh:1:cnt:41ddb23118f92d7218099a5e7a990cf58f1d07fa;origin=https://github.com/chrislgarry/Apollo-11;lines=64-72/"),
    },
];

/// Whether `resolved` (a computed browse URL) reproduces the printed `href`,
/// allowing only the browse page's trailing slash.
pub fn href_matches(resolved: &str, href: &str) -> bool {
    resolved == href || format!("{resolved}/") == href
}
