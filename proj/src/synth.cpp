#include "ugr/synth.hpp"

#include <stdexcept>
#include <string>

#include "ugr/random.hpp"

namespace ugr {

const std::array<std::string_view, 17> kSynthFamilies = {
    "APT",    "Cerber",   "CryptXXX", "CryptoLocker", "DMALocker", "DMALockerv3", "EDA2",  "Flyper",    "Globe",
    "Jigsaw", "KeRanger", "Locky",    "NoobCrypt",    "Razy",      "SamSam",      "TowerWeb", "WannaCry",
};

namespace {

struct Profile {
  std::int64_t netflow_lo, netflow_hi;
  std::int64_t btc_lo, btc_hi;
  std::int64_t usd_lo, usd_hi;
  std::array<double, 3> protocol;  // ICMP, TCP, UDP
  std::array<double, 4> threat;
  std::array<double, 3> ip_class;
};

constexpr std::array<std::string_view, 4> kThreats = {"Blacklist", "Botnet", "DoS", "Scan"};
constexpr std::array<std::string_view, 3> kIpClasses = {"A", "B", "C"};
constexpr std::array<std::string_view, 4> kFlags = {"A", "AP", "AF", "APRSF"};

// Netflow ranges are disjoint across classes; the other fields overlap.
constexpr std::array<Profile, 3> kProfiles = {{
    {0, 999, 0, 60, 0, 20000, {0.5, 0.3, 0.2}, {0.1, 0.2, 0.3, 0.4}, {0.2, 0.3, 0.5}},
    {1000, 4999, 10, 200, 500, 40000, {0.1, 0.6, 0.3}, {0.4, 0.3, 0.2, 0.1}, {0.5, 0.3, 0.2}},
    {5000, 20000, 30, 400, 1000, 60000, {0.2, 0.3, 0.5}, {0.25, 0.25, 0.25, 0.25}, {0.3, 0.4, 0.3}},
}};

std::string wallet(Rng& rng) {
  static constexpr std::string_view kBase58 = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";
  std::string s = "1";
  for (int i = 0; i < 7; ++i) s += kBase58[rng.uniform_index(kBase58.size())];
  return s;
}

}  // namespace

std::vector<FlowRecord> synthesize(const SynthOptions& options) {
  if (options.rows == 0) throw std::invalid_argument("synth: rows must be >= 1");
  if (!(options.signal_strength >= 0.0 && options.signal_strength <= 1.0)) {
    throw std::invalid_argument("synth: signal strength must lie in [0, 1]");
  }
  Rng rng(options.seed);
  // small address pools so the columns behave like categorical tokens
  std::vector<std::string> seeds, exps;
  for (int i = 0; i < 40; ++i) seeds.push_back(wallet(rng));
  for (int i = 0; i < 40; ++i) exps.push_back(wallet(rng));

  std::vector<FlowRecord> records;
  records.reserve(options.rows);
  for (std::size_t i = 0; i < options.rows; ++i) {
    const auto label = static_cast<int>(rng.categorical(kSynthPriors));
    // both draws happen on every row so the stream layout does not depend on s
    const double u = rng.uniform01();
    const auto other = static_cast<int>(rng.categorical(kSynthPriors));
    const int profile_id = u < options.signal_strength ? label : other;
    const Profile& p = kProfiles[static_cast<std::size_t>(profile_id)];

    FlowRecord r;
    r.time = rng.uniform_int(0, 100);
    r.protocol = std::string(kProtocols[rng.categorical(p.protocol)]);
    r.flag = std::string(kFlags[rng.uniform_index(kFlags.size())]);
    r.family = std::string(kSynthFamilies[rng.uniform_index(kSynthFamilies.size())]);
    r.clusters = rng.uniform_int(1, 12);
    r.seed_address = seeds[rng.uniform_index(seeds.size())];
    r.exp_address = exps[rng.uniform_index(exps.size())];
    r.btc = rng.uniform_int(p.btc_lo, p.btc_hi);
    r.usd = rng.uniform_int(p.usd_lo, p.usd_hi);
    r.netflow_bytes = rng.uniform_int(p.netflow_lo, p.netflow_hi);
    r.ip_class = std::string(kIpClasses[rng.categorical(p.ip_class)]);
    r.threat = std::string(kThreats[rng.categorical(p.threat)]);
    r.port = rng.uniform_int(5061, 5068);
    r.prediction = threat_class_from_code(label);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace ugr
