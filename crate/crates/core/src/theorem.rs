//! The proof chain end to end: Θ-configurations, the three-step lemma
//! certificates, the bridge between the lowercase and uppercase classes,
//! and composed derivations of every type-3 move from every other.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::codec::serialize_certificate;
use crate::moves::{basis_with, Letter, MoveName};
use crate::search::{
    derive, reverse_certificate, splice, verify_certificate, Certificate, SearchBounds, SearchError,
    SpliceError, VerifyError,
};
use crate::theta::{
    config_for_pair, enumerate_theta_configs, factor_via_theta, move_ends, theta_relation,
    thetas_text, ThetaConfig, ThetaError, ThetaParams,
};

#[derive(Debug, Error)]
pub enum TheoremError {
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error("pair ({x},{y}): search failed: {source}")]
    LemmaSearch {
        x: Letter,
        y: Letter,
        #[source]
        source: SearchError,
    },
    #[error("pair ({x},{y}): search found length {len}, more than 3")]
    LemmaTooLong { x: Letter, y: Letter, len: usize },
    #[error("{what}: {source}")]
    Verify {
        what: String,
        #[source]
        source: VerifyError,
    },
    #[error("bridge search failed: {0}")]
    Bridge(SearchError),
    #[error("mirrored bridge does not derive C from a: {0}")]
    MirrorMismatch(String),
    #[error("implication graph is not strongly connected: {0:?} unreachable from {1}")]
    NotStronglyConnected(Vec<Letter>, Letter),
    #[error("basis {basis}, target {target}: {source}")]
    Splice {
        basis: Letter,
        target: Letter,
        #[source]
        source: SpliceError,
    },
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn verified(what: impl Into<String>, c: Certificate) -> Result<Certificate, TheoremError> {
    verify_certificate(&c).map_err(|source| TheoremError::Verify {
        what: what.into(),
        source,
    })?;
    Ok(c)
}

/// One Θ-related pair with its two certificates for `y ⇒ x`.
#[derive(Clone, Debug)]
pub struct LemmaEntry {
    pub x: Letter,
    pub y: Letter,
    pub config: ThetaParams,
    /// Expansion, move `y`, reduction.
    pub constructive: Certificate,
    /// Found by breadth-first search with at most five crossings.
    pub searched: Certificate,
}

pub const LEMMA_MAX_CROSSINGS: usize = 5;
pub const BRIDGE_MAX_CROSSINGS: usize = 7;

/// Certificates for every Θ-related pair, in pair order.
pub fn lemma_suite(configs: &[ThetaConfig]) -> Result<Vec<LemmaEntry>, TheoremError> {
    let relation = theta_relation(configs);
    let mut out = Vec::with_capacity(relation.len());
    for (x, y) in relation {
        let t = config_for_pair(configs, x, y).expect("pair comes from a configuration");
        let constructive = verified(format!("lemma ({x},{y})"), factor_via_theta(t, x)?)?;
        let (s, g) = move_ends(x);
        let bounds = SearchBounds::for_start(&s).with_max_crossings(LEMMA_MAX_CROSSINGS);
        let searched = derive(&s, &g, &basis_with(&[y]), bounds)
            .map_err(|source| TheoremError::LemmaSearch { x, y, source })?;
        if searched.len() > 3 {
            return Err(TheoremError::LemmaTooLong {
                x,
                y,
                len: searched.len(),
            });
        }
        let searched = verified(format!("lemma search ({x},{y})"), searched)?;
        out.push(LemmaEntry {
            x,
            y,
            config: t.params,
            constructive,
            searched,
        });
    }
    Ok(out)
}

/// Strongly connected components of a directed graph on the eight
/// letters, each sorted, listed by smallest member.
pub fn equivalence_classes(edges: &BTreeSet<(Letter, Letter)>) -> Vec<BTreeSet<Letter>> {
    let reach = |from: Letter| {
        let mut seen = BTreeSet::from([from]);
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for &(from, to) in edges {
                if from == u && seen.insert(to) {
                    queue.push_back(to);
                }
            }
        }
        seen
    };
    let reach: BTreeMap<Letter, BTreeSet<Letter>> = Letter::ALL.iter().map(|&l| (l, reach(l))).collect();
    let mut classes: Vec<BTreeSet<Letter>> = Vec::new();
    for &l in &Letter::ALL {
        if classes.iter().any(|c| c.contains(&l)) {
            continue;
        }
        let class = Letter::ALL
            .iter()
            .copied()
            .filter(|&m| reach[&l].contains(&m) && reach[&m].contains(&l))
            .collect();
        classes.push(class);
    }
    classes
}

/// The lemma edges `y → x` (read "y ⇒ x").
pub fn lemma_edges(lemmas: &[LemmaEntry]) -> BTreeSet<(Letter, Letter)> {
    lemmas.iter().map(|e| (e.y, e.x)).collect()
}

/// `A ⇒ c` by search, and `a ⇒ C` as its mirror image.
pub fn bridge_theorem() -> Result<(Certificate, Certificate), TheoremError> {
    let (s, g) = move_ends(Letter::c);
    let bounds = SearchBounds::for_start(&s).with_max_crossings(BRIDGE_MAX_CROSSINGS);
    let a_to_c = derive(&s, &g, &basis_with(&[Letter::A]), bounds).map_err(TheoremError::Bridge)?;
    let a_to_c = verified("bridge A ⇒ c", a_to_c)?;
    let mirrored = a_to_c.mirrored();
    if mirrored.basis != basis_with(&[Letter::a]) {
        return Err(TheoremError::MirrorMismatch(format!(
            "basis maps to {:?}",
            mirrored.basis.iter().map(|m| m.to_string()).collect::<Vec<_>>()
        )));
    }
    let start_tri = crate::moves::sole_triangle(&mirrored.start).map(|t| t.code);
    if start_tri != Some(crate::moves::TriangleCode::up(Letter::C)) {
        return Err(TheoremError::MirrorMismatch(format!("mirrored start triangle {start_tri:?}")));
    }
    let mirrored = verified("bridge a ⇒ C", mirrored)?;
    Ok((a_to_c, mirrored))
}

/// How an implication edge was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeSource {
    Lemma,
    Bridge,
    MirroredBridge,
}

/// Directed edges `y → x`, each witnessed by a certificate deriving the
/// move `x↑ → x↓` from type-2 moves and move `y`.
#[derive(Clone, Debug, Default)]
pub struct ImplicationGraph {
    pub edges: BTreeMap<(Letter, Letter), (EdgeSource, Certificate)>,
}

impl ImplicationGraph {
    pub fn build(lemmas: &[LemmaEntry], bridge: &(Certificate, Certificate)) -> Self {
        let mut edges = BTreeMap::new();
        for e in lemmas {
            edges.insert((e.y, e.x), (EdgeSource::Lemma, e.constructive.clone()));
        }
        edges.insert((Letter::A, Letter::c), (EdgeSource::Bridge, bridge.0.clone()));
        edges.insert((Letter::a, Letter::C), (EdgeSource::MirroredBridge, bridge.1.clone()));
        ImplicationGraph { edges }
    }

    pub fn edge_set(&self) -> BTreeSet<(Letter, Letter)> {
        self.edges.keys().copied().collect()
    }

    pub fn is_strongly_connected(&self) -> bool {
        equivalence_classes(&self.edge_set()).len() == 1
    }

    /// Breadth-first tree from `root`: each reached letter with its parent.
    /// Lemma edges are preferred over bridges at equal depth.
    fn tree(&self, root: Letter) -> BTreeMap<Letter, Letter> {
        let mut parent = BTreeMap::new();
        let mut queue = VecDeque::from([root]);
        let mut seen = BTreeSet::from([root]);
        while let Some(u) = queue.pop_front() {
            let mut out: Vec<(EdgeSource, Letter)> = self
                .edges
                .iter()
                .filter(|((a, _), _)| *a == u)
                .map(|((_, b), (src, _))| (*src, *b))
                .collect();
            out.sort();
            for (_, v) in out {
                if seen.insert(v) {
                    parent.insert(v, u);
                    queue.push_back(v);
                }
            }
        }
        parent
    }
}

/// A composed derivation of move `target` from move `basis`.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub basis: Letter,
    pub target: Letter,
    /// Letters from `basis` to `target` along implication edges.
    pub path: Vec<Letter>,
    pub certificate: Certificate,
}

/// Derives each of the other seven moves from `basis` with type-2 moves,
/// by splicing edge certificates along a breadth-first tree.
pub fn full_theorem(graph: &ImplicationGraph, basis: Letter) -> Result<Vec<Derivation>, TheoremError> {
    let parent = graph.tree(basis);
    let missing: Vec<Letter> = Letter::ALL
        .iter()
        .copied()
        .filter(|&l| l != basis && !parent.contains_key(&l))
        .collect();
    if !missing.is_empty() {
        return Err(TheoremError::NotStronglyConnected(missing, basis));
    }
    let target_basis = basis_with(&[basis]);
    // Composed certificates in order of discovery, so parents come first.
    let mut order: Vec<Letter> = Vec::new();
    let mut queue = VecDeque::from([basis]);
    while let Some(u) = queue.pop_front() {
        for (&v, &p) in &parent {
            if p == u {
                order.push(v);
                queue.push_back(v);
            }
        }
    }
    let mut composed: BTreeMap<Letter, (Vec<Letter>, Certificate)> = BTreeMap::new();
    for target in order {
        let p = parent[&target];
        let edge = &graph.edges[&(p, target)].1;
        let (path, cert) = if p == basis {
            (vec![basis, target], edge.clone())
        } else {
            let (mut path, inner) = composed[&p].clone();
            let [dn, up] = MoveName::r3_both(p);
            let dict = BTreeMap::from([(dn, inner.clone()), (up, reverse_certificate(&inner))]);
            let cert = splice(edge, &dict, &target_basis).map_err(|source| TheoremError::Splice {
                basis,
                target,
                source,
            })?;
            path.push(target);
            (path, cert)
        };
        let cert = verified(format!("{basis} ⇒ {target}"), cert)?;
        composed.insert(target, (path, cert));
    }
    Ok(composed
        .into_iter()
        .map(|(target, (path, certificate))| Derivation {
            basis,
            target,
            path,
            certificate,
        })
        .collect())
}

/// Everything the pipeline computes.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub configs: Vec<ThetaConfig>,
    pub lemmas: Vec<LemmaEntry>,
    pub classes: Vec<BTreeSet<Letter>>,
    pub bridge: (Certificate, Certificate),
    pub graph: ImplicationGraph,
    pub derivations: Vec<Derivation>,
}

/// Runs the chain for the given basis letters.
pub fn run(bases: &[Letter]) -> Result<Outcome, TheoremError> {
    let configs = enumerate_theta_configs()?;
    let lemmas = lemma_suite(&configs)?;
    let classes = equivalence_classes(&lemma_edges(&lemmas));
    let bridge = bridge_theorem()?;
    let graph = ImplicationGraph::build(&lemmas, &bridge);
    let mut derivations = Vec::new();
    for &letter in bases {
        derivations.extend(full_theorem(&graph, letter)?);
    }
    Ok(Outcome {
        configs,
        lemmas,
        classes,
        bridge,
        graph,
        derivations,
    })
}

pub fn lemma_path(x: Letter, y: Letter) -> String {
    format!("lemma/{x}_{y}.cert")
}

pub const BRIDGE_PATH: &str = "bridge/A_to_c.cert";
pub const BRIDGE_MIRROR_PATH: &str = "bridge/a_to_C.cert";

pub fn theorem_path(basis: Letter, target: Letter) -> String {
    format!("theorem/{basis}/{target}.cert")
}

fn class_string(c: &BTreeSet<Letter>) -> String {
    let v: Vec<String> = c.iter().map(|l| l.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

/// Deterministic summary of an outcome.
pub fn report(o: &Outcome) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Θ-configurations ({})", o.configs.len());
    s.push_str(&thetas_text(&o.configs));
    let relation = theta_relation(&o.configs);
    let pairs: Vec<String> = relation.iter().map(|(x, y)| format!("({x},{y})")).collect();
    let _ = writeln!(s, "\n# Θ-relation ({} ordered pairs)\n{}", relation.len(), pairs.join(" "));

    let _ = writeln!(s, "\n# Lemma: y ⇒ x for Θ-related (x,y)");
    let _ = writeln!(s, "x y  constructive searched  moves                                         file");
    for e in &o.lemmas {
        let moves: Vec<String> = e.constructive.steps.iter().map(|st| st.name.to_string()).collect();
        let _ = writeln!(
            s,
            "{} {}  {:<12} {:<9} {:<45} {}",
            e.x,
            e.y,
            e.constructive.len(),
            e.searched.len(),
            moves.join(" "),
            lemma_path(e.x, e.y)
        );
    }

    let classes: Vec<String> = o.classes.iter().map(class_string).collect();
    let _ = writeln!(s, "\n# Classes under lemma edges ({})\n{}", o.classes.len(), classes.join(" "));

    let _ = writeln!(s, "\n# Bridge");
    let _ = writeln!(s, "A ⇒ c  length {}  {}", o.bridge.0.len(), BRIDGE_PATH);
    let _ = writeln!(s, "a ⇒ C  length {}  {}", o.bridge.1.len(), BRIDGE_MIRROR_PATH);
    let _ = writeln!(
        s,
        "implication graph strongly connected: {}",
        o.graph.is_strongly_connected()
    );

    let _ = writeln!(s, "\n# Derivations (basis ⇒ target)");
    let _ = writeln!(s, "basis target length path     file");
    for d in &o.derivations {
        let path: String = d.path.iter().map(|l| l.as_char()).collect();
        let _ = writeln!(
            s,
            "{:<5} {:<6} {:<6} {:<8} {}",
            d.basis,
            d.target,
            d.certificate.len(),
            path,
            theorem_path(d.basis, d.target)
        );
    }
    let _ = writeln!(s, "\n# Length matrix (row basis, column target)");
    let header: String = Letter::ALL.iter().map(|l| format!("{l:>5}")).collect();
    let _ = writeln!(s, "     {header}");
    for row_letter in Letter::ALL {
        let mut row = format!("{row_letter:<5}");
        for t in Letter::ALL {
            let cell = o
                .derivations
                .iter()
                .find(|d| d.basis == row_letter && d.target == t)
                .map_or_else(|| if row_letter == t { "·".to_string() } else { "-".to_string() }, |d| d.certificate.len().to_string());
            let _ = write!(row, "{cell:>5}");
        }
        let _ = writeln!(s, "{}", row.trim_end());
    }
    let total = o.derivations.len();
    let _ = writeln!(s, "\nverified derivations: {total}");
    s
}

fn write_file(root: &Path, rel: &str, text: &str) -> Result<(), TheoremError> {
    let path = root.join(rel);
    let io = |source| TheoremError::Io {
        path: path.clone(),
        source,
    };
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(&path, text).map_err(io)
}

/// Writes the output tree under `root`.
pub fn write_outputs(o: &Outcome, root: &Path) -> Result<(), TheoremError> {
    write_file(root, "thetas.txt", &thetas_text(&o.configs))?;
    for e in &o.lemmas {
        write_file(root, &lemma_path(e.x, e.y), &serialize_certificate(&e.constructive))?;
    }
    write_file(root, BRIDGE_PATH, &serialize_certificate(&o.bridge.0))?;
    write_file(root, BRIDGE_MIRROR_PATH, &serialize_certificate(&o.bridge.1))?;
    for d in &o.derivations {
        write_file(root, &theorem_path(d.basis, d.target), &serialize_certificate(&d.certificate))?;
    }
    write_file(root, "report.txt", &report(o))
}
