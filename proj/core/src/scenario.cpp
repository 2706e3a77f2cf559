#include "mwsched/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mwsched/capacity.hpp"
#include "mwsched/error.hpp"

namespace mwsched {

std::string_view to_string(ExperimentTag tag) noexcept {
  switch (tag) {
    case ExperimentTag::custom: return "custom";
    case ExperimentTag::fig1: return "fig1";
    case ExperimentTag::fig2: return "fig2";
    case ExperimentTag::counterexample: return "counterexample";
  }
  return "custom";
}

std::string_view to_string(ArrivalLaw law) noexcept {
  return law == ArrivalLaw::bernoulli ? "bernoulli" : "poisson";
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Entry {
  std::string value;
  int line;
};

using Document = std::map<std::string, Entry>;  // "section.key" -> value

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "system.links",     "system.channel",   "system.on_probability", "system.on_probabilities",
      "system.rate_pmf",  "arrivals.law",     "arrivals.shape",        "arrivals.rho",
      "arrivals.rate",    "arrivals.rates",   "scheduler.kind",        "run.slots",
      "run.seed",         "run.replications", "run.warmup",            "run.experiment",
  };
  return keys;
}

Document tokenize(std::string_view text) {
  static const std::set<std::string> sections = {"system", "arrivals", "scheduler", "run"};
  Document doc;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError(where + "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!sections.contains(section)) throw ValidationError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ValidationError(where + "expected key = value");
    if (section.empty()) throw ValidationError(where + "key outside of any section");
    const std::string key = section + "." + std::string(trim(line.substr(0, eq)));
    if (!known_keys().contains(key)) throw ValidationError(where + "unknown key '" + key + "'");
    if (doc.contains(key)) throw ValidationError(where + "duplicate key '" + key + "'");
    doc.emplace(key, Entry{std::string(trim(line.substr(eq + 1))), line_no});
  }
  return doc;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& what) {
  throw ValidationError("key '" + key + "': " + what);
}

double parse_double(const std::string& key, std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) {
    bad_value(key, "expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& key, std::string_view s) {
  s = trim(s);
  Int v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    bad_value(key, "expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& key, std::string_view s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = std::min(s.find(',', pos), s.size());
    out.push_back(parse_double(key, s.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

bool is_stability_experiment(ExperimentTag tag) { return tag != ExperimentTag::custom; }

}  // namespace

std::vector<double> tiered_shape(std::size_t links) {
  if (links < 3 || links % 2 == 0) {
    throw ValidationError("tiered rate pattern needs an odd link count >= 3, got " +
                          std::to_string(links));
  }
  const std::size_t half = (links - 1) / 2;
  std::vector<double> shape(links, 1.0);
  for (std::size_t i = half; i < links - 1; ++i) shape[i] = 2.0;
  shape.back() = 4.0;
  return shape;
}

std::vector<double> rate_shape(const Scenario& s) {
  switch (s.shape) {
    case ShapeKind::uniform: return std::vector<double>(s.links, 1.0);
    case ShapeKind::tiered: return tiered_shape(s.links);
    case ShapeKind::explicit_list: return s.shape_values;
  }
  return {};
}

void validate(const Scenario& s) {
  if (s.links < 1) bad_value("system.links", "must be >= 1");
  if (s.channel == ChannelKind::onoff) {
    if (s.on_probability.has_value() == !s.on_probabilities.empty()) {
      bad_value("system.on_probability",
                "exactly one of on_probability / on_probabilities is required for onoff channels");
    }
    if (!s.rate_pmf.empty()) bad_value("system.rate_pmf", "only valid with channel = multirate");
    if (s.on_probability && !(*s.on_probability > 0.0 && *s.on_probability <= 1.0)) {
      bad_value("system.on_probability", "must lie in (0, 1]");
    }
    if (!s.on_probabilities.empty()) {
      if (s.on_probabilities.size() != s.links) {
        bad_value("system.on_probabilities", "needs one entry per link");
      }
      for (double p : s.on_probabilities) {
        if (!(p > 0.0 && p <= 1.0)) bad_value("system.on_probabilities", "entries must lie in (0, 1]");
      }
    }
  } else {
    if (s.rate_pmf.size() < 2) bad_value("system.rate_pmf", "required for multirate channels (>= 2 entries)");
    if (s.on_probability || !s.on_probabilities.empty()) {
      bad_value("system.on_probability", "only valid with channel = onoff");
    }
    double sum = 0.0;
    for (double p : s.rate_pmf) {
      if (!(p >= 0.0 && p <= 1.0)) bad_value("system.rate_pmf", "entries must lie in [0, 1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) bad_value("system.rate_pmf", "entries must sum to 1");
    if (!(s.rate_pmf.back() > 0.0)) bad_value("system.rate_pmf", "the top rate must have positive probability");
  }

  const int given = int(s.target_rho.has_value()) + int(s.rate.has_value()) + int(!s.rates.empty());
  if (given != 1) bad_value("arrivals.rho", "exactly one of rho / rate / rates is required");
  if (s.target_rho) {
    if (!(*s.target_rho > 0.0)) bad_value("arrivals.rho", "must be > 0");
    if (*s.target_rho >= 1.0 && is_stability_experiment(s.experiment)) {
      bad_value("arrivals.rho", "experiment " + std::string(to_string(s.experiment)) +
                                    " requires rho < 1, got " + format_double(*s.target_rho));
    }
  }
  auto check_rate = [&](const char* key, double r) {
    if (!(r >= 0.0)) bad_value(key, "rates must be >= 0");
    if (s.law == ArrivalLaw::bernoulli && r > 1.0) bad_value(key, "Bernoulli rate must be <= 1");
  };
  if (s.rate) check_rate("arrivals.rate", *s.rate);
  if (!s.rates.empty()) {
    if (s.rates.size() != s.links) bad_value("arrivals.rates", "needs one entry per link");
    for (double r : s.rates) check_rate("arrivals.rates", r);
  }
  if (s.shape == ShapeKind::tiered && (s.links < 3 || s.links % 2 == 0)) {
    bad_value("arrivals.shape", "tiered needs an odd link count >= 3");
  }
  if (s.shape == ShapeKind::explicit_list) {
    if (s.shape_values.size() != s.links) bad_value("arrivals.shape", "needs one entry per link");
    for (double v : s.shape_values) {
      if (!(v >= 0.0)) bad_value("arrivals.shape", "entries must be >= 0");
    }
    if (std::all_of(s.shape_values.begin(), s.shape_values.end(), [](double v) { return v == 0.0; })) {
      bad_value("arrivals.shape", "needs a positive entry");
    }
  }
  if (s.slots < 1) bad_value("run.slots", "must be >= 1");
  if (s.replications < 1) bad_value("run.replications", "must be >= 1");
  if (!(s.warmup >= 0.0 && s.warmup < 1.0)) bad_value("run.warmup", "must lie in [0, 1)");
  if (s.experiment == ExperimentTag::counterexample && s.links < 3) {
    bad_value("system.links", "counterexample needs N >= 3");
  }
}

Scenario parse_scenario(std::string_view text) {
  const Document doc = tokenize(text);
  auto get = [&](const std::string& key) -> const std::string* {
    const auto it = doc.find(key);
    return it == doc.end() ? nullptr : &it->second.value;
  };
  auto require = [&](const std::string& key) -> const std::string& {
    if (const auto* v = get(key)) return *v;
    throw ValidationError("missing required key '" + key + "'");
  };

  Scenario s;
  s.links = parse_int<std::size_t>("system.links", require("system.links"));

  if (const auto* v = get("system.channel")) {
    if (*v == "onoff") s.channel = ChannelKind::onoff;
    else if (*v == "multirate") s.channel = ChannelKind::multirate;
    else bad_value("system.channel", "expected onoff or multirate, got '" + *v + "'");
  } else if (get("system.rate_pmf")) {
    s.channel = ChannelKind::multirate;
  }
  if (const auto* v = get("system.on_probability")) s.on_probability = parse_double("system.on_probability", *v);
  if (const auto* v = get("system.on_probabilities")) s.on_probabilities = parse_list("system.on_probabilities", *v);
  if (const auto* v = get("system.rate_pmf")) s.rate_pmf = parse_list("system.rate_pmf", *v);

  const std::string& law = require("arrivals.law");
  if (law == "bernoulli") s.law = ArrivalLaw::bernoulli;
  else if (law == "poisson") s.law = ArrivalLaw::poisson;
  else bad_value("arrivals.law", "expected bernoulli or poisson, got '" + law + "'");

  if (const auto* v = get("arrivals.shape")) {
    if (*v == "uniform") s.shape = ShapeKind::uniform;
    else if (*v == "tiered") s.shape = ShapeKind::tiered;
    else {
      s.shape = ShapeKind::explicit_list;
      s.shape_values = parse_list("arrivals.shape", *v);
    }
  }
  if (const auto* v = get("arrivals.rho")) s.target_rho = parse_double("arrivals.rho", *v);
  if (const auto* v = get("arrivals.rate")) s.rate = parse_double("arrivals.rate", *v);
  if (const auto* v = get("arrivals.rates")) s.rates = parse_list("arrivals.rates", *v);

  const std::string& kind = require("scheduler.kind");
  const auto parsed = parse_scheduler_kind(kind);
  if (!parsed) bad_value("scheduler.kind", "unknown scheduler '" + kind + "'");
  s.scheduler = *parsed;

  if (const auto* v = get("run.slots")) s.slots = parse_int<Slot>("run.slots", *v);
  if (const auto* v = get("run.seed")) s.seed = parse_int<std::uint64_t>("run.seed", *v);
  if (const auto* v = get("run.replications")) s.replications = parse_int<int>("run.replications", *v);
  if (const auto* v = get("run.warmup")) s.warmup = parse_double("run.warmup", *v);
  if (const auto* v = get("run.experiment")) {
    if (*v == "custom") s.experiment = ExperimentTag::custom;
    else if (*v == "fig1") s.experiment = ExperimentTag::fig1;
    else if (*v == "fig2") s.experiment = ExperimentTag::fig2;
    else if (*v == "counterexample") s.experiment = ExperimentTag::counterexample;
    else bad_value("run.experiment", "unknown experiment '" + *v + "'");
  }

  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string echo(const Scenario& s) {
  std::ostringstream out;
  out << "[system]\n";
  out << "links = " << s.links << "\n";
  out << "channel = " << (s.channel == ChannelKind::onoff ? "onoff" : "multirate") << "\n";
  if (s.on_probability) out << "on_probability = " << format_double(*s.on_probability) << "\n";
  if (!s.on_probabilities.empty()) out << "on_probabilities = " << format_list(s.on_probabilities) << "\n";
  if (!s.rate_pmf.empty()) out << "rate_pmf = " << format_list(s.rate_pmf) << "\n";
  out << "\n[arrivals]\n";
  out << "law = " << to_string(s.law) << "\n";
  switch (s.shape) {
    case ShapeKind::uniform: out << "shape = uniform\n"; break;
    case ShapeKind::tiered: out << "shape = tiered\n"; break;
    case ShapeKind::explicit_list: out << "shape = " << format_list(s.shape_values) << "\n"; break;
  }
  if (s.target_rho) out << "rho = " << format_double(*s.target_rho) << "\n";
  if (s.rate) out << "rate = " << format_double(*s.rate) << "\n";
  if (!s.rates.empty()) out << "rates = " << format_list(s.rates) << "\n";
  out << "\n[scheduler]\n";
  out << "kind = " << to_string(s.scheduler) << "\n";
  out << "\n[run]\n";
  out << "slots = " << s.slots << "\n";
  out << "seed = " << s.seed << "\n";
  out << "replications = " << s.replications << "\n";
  out << "warmup = " << format_double(s.warmup) << "\n";
  out << "experiment = " << to_string(s.experiment) << "\n";
  return out.str();
}

Scenario with_links(const Scenario& scenario, std::size_t links) {
  if (!scenario.on_probabilities.empty() || !scenario.rates.empty() ||
      scenario.shape == ShapeKind::explicit_list) {
    throw ValidationError("cannot change the link count of a scenario with per-link lists");
  }
  Scenario s = scenario;
  s.links = links;
  validate(s);
  return s;
}

ResolvedScenario resolve(const Scenario& s) {
  validate(s);
  const std::size_t n = s.links;

  ChannelModel channels = [&] {
    if (s.channel == ChannelKind::multirate) return ChannelModel::symmetric_multi_rate(n, s.rate_pmf);
    if (s.on_probability) return ChannelModel::symmetric_on_off(n, *s.on_probability);
    return ChannelModel::on_off(s.on_probabilities);
  }();

  std::vector<double> lambda;
  std::optional<double> rho;
  std::string note;
  if (s.rate) {
    lambda.assign(n, *s.rate);
  } else if (!s.rates.empty()) {
    lambda = s.rates;
  } else {
    const auto shape = rate_shape(s);
    if (channels.is_on_off()) {
      lambda = scale_to_load(shape, CapacityParams::from_channels(channels), *s.target_rho);
    } else {
      const double max_shape = *std::max_element(shape.begin(), shape.end());
      const double c = *s.target_rho * multirate_mu_sym_lower(channels) /
                       (static_cast<double>(n) * max_shape);
      lambda = shape;
      for (double& v : lambda) v *= c;
    }
  }

  std::vector<LinkArrivals> links;
  links.reserve(n);
  for (double r : lambda) links.push_back({s.law, r});
  ArrivalModel arrivals(std::move(links));

  if (channels.is_on_off()) {
    try {
      rho = onoff_load(lambda, CapacityParams::from_channels(channels)).rho;
    } catch (const ExactCheckUnavailable& e) {
      note = e.what();
    }
  } else {
    rho = multirate_load_upper(lambda, channels);
    note = "rho is an upper bound from the symmetric-rate lower bound";
  }

  return ResolvedScenario{std::move(channels), std::move(arrivals), s.scheduler,
                          std::move(lambda), rho, std::move(note)};
}

}  // namespace mwsched
