#include <array>
#include <cmath>
#include <span>
#include <sstream>
#include <stdexcept>

#include "sbwave/wavelet_basis.hpp"

namespace sbwave {
namespace {

// Reconstruction lowpass filters of the Daubechies (dbN) and least
// asymmetric (symN) families, refined to satisfy the orthonormality and
// vanishing-moment equations to well below double precision.
constexpr std::array<double, 2> kHaar{
    0.7071067811865475244,
    0.7071067811865475244,
};

constexpr std::array<double, 4> kDb2{
    0.48296291314453414272,
    0.83651630373780790589,
    0.22414386804201338129,
    -0.1294095225512603811,
};

constexpr std::array<double, 6> kDb3{
    0.33267055295008261632,
    0.80689150931109257644,
    0.45987750211849156992,
    -0.13501102001025458883,
    -0.085441273882026661679,
    0.035226291885709536634,
};

constexpr std::array<double, 8> kDb4{
    0.23037781330889650025,
    0.71484657055291564705,
    0.63088076792985890819,
    -0.027983769416859853763,
    -0.18703481171909308404,
    0.030841381835560763462,
    0.032883011666885199722,
    -0.010597401785069032073,
};

constexpr std::array<double, 10> kDb5{
    0.16010239797419291475,
    0.6038292697971896706,
    0.72430852843777292764,
    0.13842814590132073126,
    -0.24229488706638203195,
    -0.032244869584638374545,
    0.077571493840045713559,
    -0.0062414902127982743121,
    -0.012580751999081999474,
    0.0033357252854737712847,
};

constexpr std::array<double, 12> kDb6{
    0.1115407433501094639,
    0.49462389039845308575,
    0.75113390802109535065,
    0.31525035170919762883,
    -0.22626469396543982026,
    -0.12976686756726193547,
    0.097501605587323049189,
    0.027522865530305728574,
    -0.031582039317486029591,
    0.00055384220116149615918,
    0.0047772575109455106432,
    -0.0010773010853084795682,
};

constexpr std::array<double, 14> kDb7{
    0.077852054085009178363,
    0.39653931948191730636,
    0.72913209084623511988,
    0.46978228740519312297,
    -0.14390600392856497482,
    -0.22403618499387498269,
    0.071309219266830264473,
    0.080612609151083071988,
    -0.038029936935014413467,
    -0.016574541630666880715,
    0.012550998556099840582,
    0.00042957797292136654459,
    -0.0018016407040474909114,
    0.00035371379997452024486,
};

constexpr std::array<double, 16> kDb8{
    0.054415842243104009595,
    0.31287159091429997058,
    0.67563073629728980676,
    0.58535468365420671296,
    -0.01582910525634930534,
    -0.28401554296154692643,
    0.00047248457391328264151,
    0.12874742662047845885,
    -0.017369301001807546107,
    -0.044088253930794751532,
    0.013981027917398281623,
    0.008746094047405776736,
    -0.0048703529934515743035,
    -0.00039174037337694705289,
    0.00067544940645056936553,
    -0.00011747678412476953284,
};

constexpr std::array<double, 18> kDb9{
    0.038077947363878346926,
    0.24383467461259035378,
    0.60482312369011111195,
    0.65728807805130053798,
    0.13319738582500757595,
    -0.29327378327917490896,
    -0.096840783222976460478,
    0.14854074933810638017,
    0.030725681479333379193,
    -0.067632829061329973657,
    0.00025094711483145197405,
    0.022361662123679097182,
    -0.0047232047577513972861,
    -0.0042815036824634298224,
    0.0018476468830562264788,
    0.00023038576352319596393,
    -0.00025196318894271013723,
    0.000039347320316271599862,
};

constexpr std::array<double, 20> kDb10{
    0.026670057900555553889,
    0.18817680007769148904,
    0.5272011889317255865,
    0.6884590394536035657,
    0.28117234366057746062,
    -0.24984642432731537955,
    -0.19594627437737704357,
    0.12736934033579326008,
    0.093057364603572351192,
    -0.071394147166397087105,
    -0.029457536821875812863,
    0.033212674059341001704,
    0.0036065535669561696532,
    -0.010733175483330575024,
    0.0013953517470529011675,
    0.0019924052951850561099,
    -0.00068585669495971162705,
    -0.00011646685512928544936,
    0.000093588670320069591388,
    -0.000013264202894521244969,
};

constexpr std::array<double, 8> kSym4{
    0.03222310060405405984,
    -0.012603967262034516235,
    -0.099219543576629646545,
    0.29785779560531615949,
    0.80373875180513337557,
    0.49761866763276688974,
    -0.029635527646008054593,
    -0.075765714789503218471,
};

constexpr std::array<double, 10> kSym5{
    0.01953888273525872835,
    -0.021101834024703878327,
    -0.17532808990807135625,
    0.016602105764511666663,
    0.63397896345679551647,
    0.72340769040403370623,
    0.19939753397685520282,
    -0.039134249302301463795,
    0.029519490925715951515,
    0.027333068345000975131,
};

constexpr std::array<double, 12> kSym6{
    -0.0078007083250251116224,
    0.001767711864245080102,
    0.044724901770786732657,
    -0.021060292512352304451,
    -0.07263752278640729013,
    0.33792942172808804547,
    0.78764114102863909753,
    0.4910559419280460914,
    -0.048311742585647343593,
    -0.11799011114852581046,
    0.0034907120842069085442,
    0.015404109327040953356,
};

constexpr std::array<double, 14> kSym7{
    0.010268176708476991333,
    0.0040102448715171106306,
    -0.10780823770331696671,
    -0.14004724044299311463,
    0.28862963175058598301,
    0.76776431700486609905,
    0.53610191709060527108,
    0.017441255086891612909,
    -0.049552834937001240303,
    0.067892693501237017647,
    0.030515513165881026664,
    -0.01263630340323818673,
    -0.0010473848886773811667,
    0.0026818145682608260144,
};

constexpr std::array<double, 16> kSym8{
    0.0018899503327734651908,
    -0.00030292051473156955892,
    -0.014952258337059792084,
    0.0038087520139143687457,
    0.049137179673717298818,
    -0.027219029917142233139,
    -0.051945838107796746716,
    0.36444189483637427971,
    0.77718575169965488247,
    0.48135965125885933931,
    -0.061273359067949703391,
    -0.14329423835124785111,
    0.0076074873250244072106,
    0.031695087811525252123,
    -0.00054213233181217161448,
    -0.00338241595100817717,
};

constexpr std::array<double, 18> kSym9{
    0.0010694900329086084092,
    -0.00047315449868003648147,
    -0.010264064027633125664,
    0.0088592674934002343679,
    0.062077789302885753268,
    -0.018233770779395447442,
    -0.19155083129728448447,
    0.035272488035270541013,
    0.61733844914093376605,
    0.71789708276441258901,
    0.23876091460730561823,
    -0.05456895843083310606,
    0.00058346274612503806028,
    0.030224878858275232394,
    -0.011528210207679151246,
    -0.01327196778181713356,
    0.00061978088898549889172,
    0.0014009155259146540329,
};

constexpr std::array<double, 20> kSym10{
    -0.00045932942100464793982,
    0.000057036083618489405893,
    0.0045931735853117929469,
    -0.00080435893201643266223,
    -0.020354939812311117004,
    0.0057649120335811015999,
    0.049994972077375189482,
    -0.031990056882428034858,
    -0.035536740473819811738,
    0.38382676106707585469,
    0.76951003702109788349,
    0.47169066693844339728,
    -0.070880535783231219643,
    -0.15949427888491068041,
    0.011609893903711184688,
    0.045927239231091518634,
    -0.0014653825813045709531,
    -0.0086412992770221497378,
    0.000095632670722843918557,
    0.00077015980911445760923,
};
struct TableEntry {
  std::string_view name;
  std::span<const double> taps;
  int vanishing_moments;
};

constexpr std::array<TableEntry, 17> kTable{{
    {"haar", kHaar, 1},
    {"db2", kDb2, 2},
    {"db3", kDb3, 3},
    {"db4", kDb4, 4},
    {"db5", kDb5, 5},
    {"db6", kDb6, 6},
    {"db7", kDb7, 7},
    {"db8", kDb8, 8},
    {"db9", kDb9, 9},
    {"db10", kDb10, 10},
    {"sym4", kSym4, 4},
    {"sym5", kSym5, 5},
    {"sym6", kSym6, 6},
    {"sym7", kSym7, 7},
    {"sym8", kSym8, 8},
    {"sym9", kSym9, 9},
    {"sym10", kSym10, 10},
}};

}  // namespace

double WaveletFilter::highpass(std::size_t k) const {
  const std::size_t last = lowpass.size() - 1;
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return sign * lowpass[last - k];
}

std::vector<std::string> available_filters() {
  std::vector<std::string> names;
  for (const auto& entry : kTable) names.emplace_back(entry.name);
  return names;
}

void validate_filter(const WaveletFilter& filter, double tolerance) {
  const auto& h = filter.lowpass;
  if (h.size() < 2 || h.size() % 2 != 0)
    throw std::logic_error("filter '" + filter.name + "' must have an even number of taps");
  double sum = 0.0;
  for (double v : h) sum += v;
  if (std::abs(sum - std::sqrt(2.0)) > tolerance)
    throw std::logic_error("filter '" + filter.name + "' does not sum to sqrt(2)");
  for (std::size_t m = 0; 2 * m < h.size(); ++m) {
    double dot = 0.0;
    for (std::size_t k = 0; k + 2 * m < h.size(); ++k) dot += h[k] * h[k + 2 * m];
    const double expected = (m == 0) ? 1.0 : 0.0;
    if (std::abs(dot - expected) > tolerance) {
      std::ostringstream msg;
      msg << "filter '" << filter.name << "' violates QMF orthonormality at shift " << 2 * m;
      throw std::logic_error(msg.str());
    }
  }
}

WaveletFilter load_filter(std::string_view name) {
  for (const auto& entry : kTable) {
    if (entry.name != name) continue;
    WaveletFilter filter{std::string(entry.name),
                         std::vector<double>(entry.taps.begin(), entry.taps.end()),
                         entry.vanishing_moments};
    validate_filter(filter);
    return filter;
  }
  std::ostringstream msg;
  msg << "unknown wavelet filter '" << name << "'; available:";
  for (const auto& entry : kTable) msg << ' ' << entry.name;
  throw std::invalid_argument(msg.str());
}

}  // namespace sbwave
