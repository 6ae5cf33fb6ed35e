//! Static registry of the descriptive anchors carried by report entries.
//! Each anchor names the statement a check exercises.

pub const HAAR_PARSEVAL: &str = "Haar expansion: Parseval identity on the dyadic tree";
pub const WEIGHTED_HAAR_BOUNDS: &str = "weighted Haar decomposition: |alpha| <= sqrt<w>, |beta| <= |Delta w|/<w>";
pub const WEIGHTED_HAAR_ORTHO: &str = "weighted Haar decomposition: orthonormal basis of L2(w)";
pub const BUCKLEY: &str = "Buckley sum bounded for A-infinity weights";
pub const CARLESON_WEIGHT: &str = "Carleson sequence built from a weight: intensity against Q^alpha";
pub const MT_RATIO: &str = "weighted martingale transform against [w]_A2";
pub const ZIGZAG: &str = "zigzag concavity of Burkholder's function";
pub const MAJORANT: &str = "Burkholder's function majorizes |y|^p - (p*-1)^p |x|^p";
pub const HESSIAN_FORM: &str = "second variation of Phi on vector arguments";
pub const TRANSITION: &str = "linear majorant exists iff c >= p*-1";
pub const SECTION: &str = "section inequality for H on [-1, s_p]";
pub const TAU: &str = "tau(p) as the L^p norm of cos on the circle";
pub const INTERPOLATION: &str = "interpolated constant for R1^2 - R2^2 against q-1";
pub const POWER_BELLMAN: &str = "x^a y^a Hessian estimate on the A2 domain";
pub const JN: &str = "John-Nirenberg Bellman function: degenerate concavity system";
pub const AB_ISOMETRY: &str = "Ahlfors-Beurling transform is an L2 isometry";
pub const AB_DERIVATIVES: &str = "Ahlfors-Beurling transform exchanges d/dz and d/dzbar";
pub const MULTIPLIER: &str = "Fourier multiplier on the periodic grid";
pub const HEAT_IDENTITY: &str = "heat-extension representation of the second Riesz transform";
pub const NORM_ASCENT: &str = "lower bound for ||R1^2 - R2^2||_p by explicit test functions";
pub const AP_HEAT: &str = "heat and classical A_p characteristics";
pub const LAMINATE_LIMIT: &str = "laminate ratio tends to (p-1)^p as eta -> 0";
pub const LAMINATE_PRINTED: &str = "printed closed form of the laminate ratio";
pub const LAMINATE_INEQUALITY: &str = "Jensen inequality of a laminate against bi-concave functions";
pub const LAMINATE_BARICENTER: &str = "baricenter of a laminate";
pub const RIEMANN_GAP: &str = "left and right Riemann sums of int w dw differ by b - a";
pub const ITO_ISOMETRY: &str = "Ito isometry";
pub const CONFORMAL_PATHS: &str = "heat martingales: orthogonal rows and differential subordination";
pub const AB_CONDITIONING: &str = "Ahlfors-Beurling transform as a conditional expectation of a martingale transform";
pub const SUBORDINATION_CONSTANTS: &str = "sharp constants for subordinate and conformal martingales";
pub const QC_DISTORTION: &str = "area distortion |f(B_r)| ~ r^{2/K} of the radial stretch";
pub const QC_SOBOLEV: &str = "integrability of Df for the singular radial map below 1+k";
pub const QC_WEIGHT: &str = "Jacobian powers as A2 weights";
pub const SUITE: &str = "acceptance battery";

pub const REGISTRY: &[&str] = &[
    HAAR_PARSEVAL,
    WEIGHTED_HAAR_BOUNDS,
    WEIGHTED_HAAR_ORTHO,
    BUCKLEY,
    CARLESON_WEIGHT,
    MT_RATIO,
    ZIGZAG,
    MAJORANT,
    HESSIAN_FORM,
    TRANSITION,
    SECTION,
    TAU,
    INTERPOLATION,
    POWER_BELLMAN,
    JN,
    AB_ISOMETRY,
    AB_DERIVATIVES,
    MULTIPLIER,
    HEAT_IDENTITY,
    NORM_ASCENT,
    AP_HEAT,
    LAMINATE_LIMIT,
    LAMINATE_PRINTED,
    LAMINATE_INEQUALITY,
    LAMINATE_BARICENTER,
    RIEMANN_GAP,
    ITO_ISOMETRY,
    CONFORMAL_PATHS,
    AB_CONDITIONING,
    SUBORDINATION_CONSTANTS,
    QC_DISTORTION,
    QC_SOBOLEV,
    QC_WEIGHT,
    SUITE,
];
