//! Symmetric triangle rules by orbit. Weights sum to the reference area 1/2.

/// Orbit description of a fully symmetric rule.
#[derive(Debug, Clone, Copy)]
pub struct TriangleOrbits {
    pub degree: usize,
    pub centroid: Option<f64>,
    /// `(w, a)`: barycentric `(1 - 2a, a, a)` and its 3 permutations.
    pub s21: &'static [(f64, f64)],
    /// `(w, a, b)`: barycentric `(a, b, 1 - a - b)` and its 6 permutations.
    pub s111: &'static [(f64, f64, f64)],
}

pub const MAX_TRIANGLE_DEGREE: usize = 13;

pub static TRIANGLE_RULES: [TriangleOrbits; MAX_TRIANGLE_DEGREE] = [
    TriangleOrbits {
        degree: 1,
        centroid: Some(0.5),
        s21: &[],
        s111: &[],
    },
    TriangleOrbits {
        degree: 2,
        centroid: None,
        s21: &[(0.16666666666666666, 0.16666666666666666)],
        s111: &[],
    },
    TriangleOrbits {
        degree: 3,
        centroid: None,
        s21: &[(0.06454650479205844, 0.44987581471720645), (0.10212016187460823, 0.14162958584957197)],
        s111: &[],
    },
    TriangleOrbits {
        degree: 4,
        centroid: None,
        s21: &[(0.11169079483900574, 0.4459484909159649), (0.054975871827660935, 0.09157621350977074)],
        s111: &[],
    },
    TriangleOrbits {
        degree: 5,
        centroid: Some(0.1125),
        s21: &[(0.0661970763942531, 0.4701420641051151), (0.06296959027241357, 0.10128650732345634)],
        s111: &[],
    },
    TriangleOrbits {
        degree: 6,
        centroid: None,
        s21: &[(0.02542245318510341, 0.06308901449150223), (0.058393137863189684, 0.24928674517091043)],
        s111: &[(0.041425537809186785, 0.053145049844816945, 0.3103524510337844)],
    },
    TriangleOrbits {
        degree: 7,
        centroid: None,
        s21: &[(0.011218634001455298, 0.45278032376872185), (0.06283819245762065, 0.24024822070418028), (0.025894163328160146, 0.0642468466253836)],
        s111: &[(0.033357838439715286, 0.04388717349622735, 0.30672418266762264)],
    },
    TriangleOrbits {
        degree: 8,
        centroid: Some(0.07215780383889359),
        s21: &[(0.04754581713364231, 0.4592925882927232), (0.05160868526735912, 0.1705693077517602), (0.01622924881159904, 0.05054722831703098)],
        s111: &[(0.013615157087217496, 0.7284923929554042, 0.008394777409957605)],
    },
    TriangleOrbits {
        degree: 9,
        centroid: Some(0.04856789814139942),
        s21: &[(0.039823869463605124, 0.18820353561903272), (0.012788837829349016, 0.04472951339445271), (0.015667350113569536, 0.4896825191987376), (0.03891377050238714, 0.43708959149293664)],
        s111: &[(0.021641769688644688, 0.741198598784498, 0.036838412054736286)],
    },
    TriangleOrbits {
        degree: 10,
        centroid: Some(0.04160986849322507),
        s21: &[(0.005475644170134205, 0.028503500288387836), (0.026325974734122296, 0.16291311787409476)],
        s111: &[(0.02813863985540559, 0.14681150539393042, 0.516492619327838), (0.017697473895769197, 0.60732977850085, 0.3633626169945705), (0.014661432047826118, 0.03368569868061029, 0.15330305516956136)],
    },
    TriangleOrbits {
        degree: 11,
        centroid: Some(0.04346913691007434),
        s21: &[(0.004815666640724543, 0.027345066203266634), (0.008893567364955631, 0.49521254529659114), (0.03568250509091269, 0.2087522607150097), (0.034200091334917124, 0.4387396272561795), (0.019149984094028894, 0.09852324946249727)],
        s111: &[(0.004396694453734457, 0.8507292275233659, 0.003951810511998567), (0.02032087546515038, 0.6714446898622545, 0.28313398797332884)],
    },
    TriangleOrbits {
        degree: 12,
        centroid: None,
        s21: &[],
        s111: &[(0.0006808216259304327, 0.025446043828620736, 0.02479854268209265), (0.001470668642465305, 0.025446043828620736, 0.12594590281051807), (0.0020076319553187826, 0.025446043828620736, 0.2895179791517823), (0.0021975960562867227, 0.025446043828620736, 0.48727697808568965), (0.0020076319553187826, 0.025446043828620736, 0.685035977019597), (0.001470668642465305, 0.025446043828620736, 0.8486080533608612), (0.0006808216259304327, 0.025446043828620736, 0.9497554134892866), (0.0013140448962920502, 0.12923440720030277, 0.022157539438836013), (0.0028385182699319253, 0.12923440720030277, 0.11253287519588911), (0.0038749041217868755, 0.12923440720030277, 0.25868479948783757), (0.00424155134309758, 0.12923440720030277, 0.4353827963998486), (0.0038749041217868755, 0.12923440720030277, 0.6120807933118596), (0.0028385182699319253, 0.12923440720030277, 0.7582327176038081), (0.0013140448962920502, 0.12923440720030277, 0.8486080533608612), (0.0014480571507930445, 0.2970774243113014, 0.0178865986691016), (0.00312800322883191, 0.2970774243113014, 0.09084178237683893), (0.0042700844073320365, 0.2970774243113014, 0.2088224282758644), (0.00467412397411969, 0.2970774243113014, 0.35146128784434927), (0.0042700844073320365, 0.2970774243113014, 0.4941001474128342), (0.00312800322883191, 0.2970774243113014, 0.6120807933118596), (0.0014480571507930445, 0.2970774243113014, 0.685035977019597), (0.0011274881407901578, 0.5, 0.012723021914310368), (0.0024355299394984635, 0.5, 0.06461720360015138), (0.0033247786710649814, 0.5, 0.1485387121556507), (0.0036393724836873524, 0.5, 0.25), (0.0033247786710649814, 0.5, 0.35146128784434927), (0.0024355299394984635, 0.5, 0.4353827963998486), (0.0011274881407901578, 0.5, 0.48727697808568965), (0.0006119949813700028, 0.7029225756886985, 0.0075594451595191355), (0.0013219935944557806, 0.7029225756886985, 0.03839262482346385), (0.0018046734038655332, 0.7029225756886985, 0.08825499603543702), (0.0019754333680102724, 0.7029225756886985, 0.1485387121556507), (0.0018046734038655332, 0.7029225756886985, 0.2088224282758644), (0.0013219935944557806, 0.7029225756886985, 0.25868479948783757), (0.0006119949813700028, 0.7029225756886985, 0.2895179791517823), (0.0001950235684679266, 0.8707655927996972, 0.003288504389784724), (0.0004212778145751385, 0.8707655927996972, 0.016701532004413672), (0.0005750927015008153, 0.8707655927996972, 0.03839262482346385), (0.0006295085358993465, 0.8707655927996972, 0.06461720360015138), (0.0005750927015008153, 0.8707655927996972, 0.09084178237683893), (0.0004212778145751385, 0.8707655927996972, 0.11253287519588911), (0.0001950235684679266, 0.8707655927996972, 0.12594590281051807), (1.777656005928941e-05, 0.9745539561713793, 0.0006475011465280875), (3.8399822294671776e-05, 0.9745539561713793, 0.003288504389784724), (5.24201768442645e-05, 0.9745539561713793, 0.0075594451595191355), (5.7380225293592934e-05, 0.9745539561713793, 0.012723021914310368), (5.24201768442645e-05, 0.9745539561713793, 0.0178865986691016), (3.8399822294671776e-05, 0.9745539561713793, 0.022157539438836013), (1.777656005928941e-05, 0.9745539561713793, 0.02479854268209265)],
    },
    TriangleOrbits {
        degree: 13,
        centroid: None,
        s21: &[],
        s111: &[(0.00041848988914387075, 0.019855071751231884, 0.019460847876985318), (0.0009193476253487974, 0.019855071751231884, 0.09964816045299504), (0.0012968977352447759, 0.019855071751231884, 0.2325235010194628), (0.0014993746018900002, 0.019855071751231884, 0.4001761968707655), (0.0014993746018900002, 0.019855071751231884, 0.5799687313780026), (0.0012968977352447759, 0.019855071751231884, 0.7476214272293052), (0.0009193476253487974, 0.019855071751231884, 0.880496767795773), (0.00041848988914387075, 0.019855071751231884, 0.9606840803717828), (0.000842610624178416, 0.10166676129318664, 0.0178364709110403), (0.0018510652145428074, 0.10166676129318664, 0.09133063094134083), (0.0026112454291924193, 0.10166676129318664, 0.21311500343064047), (0.003018923519897663, 0.10166676129318664, 0.3667739011113349), (0.003018923519897663, 0.10166676129318664, 0.5315593375954785), (0.0026112454291924193, 0.10166676129318664, 0.6852182352761729), (0.0018510652145428074, 0.10166676129318664, 0.8070026077654725), (0.000842610624178416, 0.10166676129318664, 0.880496767795773), (0.0010092688695527506, 0.2372337950418355, 0.015144777728859202), (0.0022171836468020344, 0.2372337950418355, 0.07754796968199158), (0.003127718363408369, 0.2372337950418355, 0.1809539215318839), (0.0036160302763381335, 0.2372337950418355, 0.31142422942195), (0.0036160302763381335, 0.2372337950418355, 0.45134197553621447), (0.003127718363408369, 0.2372337950418355, 0.5818122834262806), (0.0022171836468020344, 0.2372337950418355, 0.6852182352761729), (0.0010092688695527506, 0.2372337950418355, 0.7476214272293052), (0.0009051783031337537, 0.4082826787521751, 0.01174858986982229), (0.001988515242759381, 0.4082826787521751, 0.060157983652346446), (0.002805142302788817, 0.4082826787521751, 0.14037534571161042), (0.0032430923496793297, 0.4082826787521751, 0.24158793298312328), (0.0032430923496793297, 0.4082826787521751, 0.35012938826470164), (0.002805142302788817, 0.4082826787521751, 0.45134197553621447), (0.001988515242759381, 0.4082826787521751, 0.5315593375954785), (0.0009051783031337537, 0.4082826787521751, 0.5799687313780026), (0.0006245695521848911, 0.591717321247825, 0.008106481881409593), (0.0013720678792049409, 0.591717321247825, 0.04150877764084018), (0.0019355374137915238, 0.591717321247825, 0.09685844933022508), (0.002237721263889112, 0.591717321247825, 0.1666947457690518), (0.002237721263889112, 0.591717321247825, 0.24158793298312328), (0.0019355374137915238, 0.591717321247825, 0.31142422942195), (0.0013720678792049409, 0.591717321247825, 0.3667739011113349), (0.0006245695521848911, 0.591717321247825, 0.4001761968707655), (0.00031390048822982976, 0.7627662049581645, 0.004710294022372683), (0.0006895833709155905, 0.7627662049581645, 0.024118791611195053), (0.000972775789423055, 0.7627662049581645, 0.05627987350995162), (0.0011246494402422074, 0.7627662049581645, 0.09685844933022508), (0.0011246494402422074, 0.7627662049581645, 0.14037534571161042), (0.000972775789423055, 0.7627662049581645, 0.1809539215318839), (0.0006895833709155905, 0.7627662049581645, 0.21311500343064047), (0.00031390048822982976, 0.7627662049581645, 0.2325235010194628), (9.536048484053525e-05, 0.8983332387068134, 0.002018600840191585), (0.00020948997231356434, 0.8983332387068134, 0.010336130351845791), (0.00029552158852520576, 0.8983332387068134, 0.024118791611195053), (0.0003416596020666586, 0.8983332387068134, 0.04150877764084018), (0.0003416596020666586, 0.8983332387068134, 0.060157983652346446), (0.00029552158852520576, 0.8983332387068134, 0.07754796968199158), (0.00020948997231356434, 0.8983332387068134, 0.09133063094134083), (9.536048484053525e-05, 0.8983332387068134, 0.09964816045299504), (8.477467501630236e-06, 0.9801449282487681, 0.0003942238742465664), (1.8623483670153822e-05, 0.9801449282487681, 0.002018600840191585), (2.6271622537804543e-05, 0.9801449282487681, 0.004710294022372683), (3.0373253428644785e-05, 0.9801449282487681, 0.008106481881409593), (3.0373253428644785e-05, 0.9801449282487681, 0.01174858986982229), (2.6271622537804543e-05, 0.9801449282487681, 0.015144777728859202), (1.8623483670153822e-05, 0.9801449282487681, 0.0178364709110403), (8.477467501630236e-06, 0.9801449282487681, 0.019460847876985318)],
    },
];
