#include "srcloc/epidemic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace srcloc {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

double parse_double(const std::string& text) {
  double x = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc() || end != text.data() + text.size())
    throw std::invalid_argument("bad number '" + text + "'");
  return x;
}

}  // namespace

TransmissionModel TransmissionModel::truncated_gaussian(double sigma) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
  return {Kind::truncated_gaussian, sigma};
}

TransmissionModel TransmissionModel::uniform_factor(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1)");
  return {Kind::uniform_factor, epsilon};
}

double TransmissionModel::relative_sd() const {
  switch (kind) {
    case Kind::deterministic: return 0.0;
    case Kind::truncated_gaussian: return parameter;
    case Kind::uniform_factor: return parameter / std::sqrt(3.0);
  }
  return 0.0;
}

std::string TransmissionModel::describe() const {
  switch (kind) {
    case Kind::deterministic: return "deterministic";
    case Kind::truncated_gaussian: return "gaussian:" + format_double(parameter);
    case Kind::uniform_factor: return "uniform:" + format_double(parameter);
  }
  return "?";
}

TransmissionModel TransmissionModel::parse(const std::string& text) {
  if (text == "deterministic") return deterministic();
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("bad model '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const double value = parse_double(text.substr(colon + 1));
  if (kind == "gaussian") return truncated_gaussian(value);
  if (kind == "uniform") return uniform_factor(value);
  throw std::invalid_argument("bad model '" + text + "'");
}

double sample_delay(const TransmissionModel& model, double w, Rng& rng) {
  switch (model.kind) {
    case TransmissionModel::Kind::deterministic:
      return w;
    case TransmissionModel::Kind::truncated_gaussian: {
      const double sigma = model.parameter;
      if (sigma == 0.0) return w;
      // Standardized support [-b, b]; invert the CDF on [Phi(-b), Phi(b)],
      // working from the nearer tail so the upper half keeps its precision.
      const double b = 0.5 / sigma;
      const double lower = normal_cdf(-b);
      const double mass = 1.0 - 2.0 * lower;
      const double u = uniform01(rng);
      double z = u < 0.5 ? normal_quantile(lower + u * mass) : -normal_quantile(lower + (1.0 - u) * mass);
      z = std::clamp(z, -b, b);
      return w + sigma * w * z;
    }
    case TransmissionModel::Kind::uniform_factor: {
      const double eps = model.parameter;
      return w * (1.0 - eps + 2.0 * eps * uniform01(rng));
    }
  }
  return w;
}

std::vector<double> sample_edge_delays(const Graph& g, const TransmissionModel& model, Rng& rng) {
  std::vector<double> delays;
  delays.reserve(g.edges().size());
  for (const Edge& e : g.edges()) delays.push_back(sample_delay(model, e.w, rng));
  return delays;
}

EpidemicTrace simulate(const Graph& g, const TransmissionModel& model, NodeId source,
                       std::uint64_t seed) {
  if (source >= g.node_count()) throw std::invalid_argument("source outside the graph");
  Rng rng(seed);
  EpidemicTrace trace;
  trace.source = source;
  trace.rng_seed = seed;
  trace.model = model;
  if (model.relative_sd() == 0.0) {
    trace.infection_time.assign(g.distances().row(source).begin(), g.distances().row(source).end());
    return trace;
  }
  const std::vector<double> delays = sample_edge_delays(g, model, rng);
  trace.infection_time = single_source_distances(g, source, delays);
  return trace;
}

Observation make_observation(const std::vector<NodeId>& observers, const std::vector<double>& times) {
  if (observers.size() != times.size()) throw std::invalid_argument("observer/time count mismatch");
  std::vector<std::size_t> idx(observers.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return observers[a] < observers[b]; });
  Observation obs;
  std::vector<NodeId> sorted;
  for (std::size_t i : idx) {
    sorted.push_back(observers[i]);
    obs.times.push_back(times[i]);
  }
  obs.observers = ObserverSet(std::move(sorted));
  for (std::size_t i = 1; i < obs.times.size(); ++i) obs.tau.push_back(obs.times[i] - obs.times[0]);
  return obs;
}

Observation observe(const EpidemicTrace& trace, const ObserverSet& observers, std::optional<std::size_t> limit) {
  if (observers.size() < 2) throw std::invalid_argument("observation needs at least 2 observers");
  if (limit && *limit < 2) throw std::invalid_argument("observation limit must be at least 2");
  std::vector<NodeId> kept = observers.nodes();
  if (limit && *limit < kept.size()) {
    std::sort(kept.begin(), kept.end(), [&](NodeId a, NodeId b) {
      const double ta = trace.infection_time[a], tb = trace.infection_time[b];
      return ta != tb ? ta < tb : a < b;
    });
    kept.resize(*limit);
  }
  std::vector<double> times;
  for (NodeId o : kept) times.push_back(trace.infection_time.at(o));
  return make_observation(kept, times);
}

void write_trace_csv(std::ostream& out, const Graph& g, const EpidemicTrace& trace) {
  out << "# source=" << g.label(trace.source) << '\n';
  out << "# seed=" << trace.rng_seed << '\n';
  out << "# model=" << trace.model.describe() << '\n';
  out << "node,infection_time\n";
  for (NodeId v = 0; v < g.node_count(); ++v)
    out << g.label(v) << ',' << format_double(trace.infection_time[v]) << '\n';
}

EpidemicTrace read_trace_csv(std::istream& in, const Graph& g) {
  EpidemicTrace trace;
  trace.infection_time.assign(g.node_count(), std::numeric_limits<double>::quiet_NaN());
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      const std::string value = line.substr(eq + 1);
      if (key == "source") trace.source = g.find(value);
      else if (key == "seed") trace.rng_seed = std::stoull(value);
      else if (key == "model") trace.model = TransmissionModel::parse(value);
      continue;
    }
    if (!header_seen && line == "node,infection_time") {
      header_seen = true;
      continue;
    }
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) throw std::invalid_argument("bad trace line '" + line + "'");
    trace.infection_time[g.find(line.substr(0, comma))] = parse_double(line.substr(comma + 1));
  }
  return trace;
}

}  // namespace srcloc
