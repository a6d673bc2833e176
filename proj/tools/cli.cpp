#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>

#include "secount/analysis.hpp"
#include "secount/csv.hpp"
#include "secount/distributions.hpp"
#include "secount/errors.hpp"
#include "secount/estimators.hpp"
#include "secount/experiments.hpp"
#include "secount/explicit_tree.hpp"
#include "secount/le_tree.hpp"
#include "secount/poset.hpp"
#include "secount/run_many.hpp"
#include "secount/verify.hpp"

namespace secount::cli {

namespace {

struct UsageError : Error {
  using Error::Error;
};

struct CheckFailed : Error {
  using Error::Error;
};

using Value = std::variant<std::monostate, std::string, long long, double>;
using Record = std::vector<std::pair<std::string, Value>>;

/// Emits records as CSV (header from the first record) or JSON lines.
class RecordWriter {
 public:
  RecordWriter(std::ostream& os, bool json) : os_(os), json_(json) {}

  void write(const Record& r) {
    if (json_) {
      nlohmann::ordered_json j = nlohmann::ordered_json::object();
      for (const auto& [k, v] : r) {
        std::visit(
            [&](const auto& x) {
              using X = std::decay_t<decltype(x)>;
              if constexpr (std::is_same_v<X, std::monostate>) {
                j[k] = nullptr;
              } else if constexpr (std::is_same_v<X, double>) {
                if (std::isfinite(x)) {
                  j[k] = x;
                } else {
                  j[k] = nullptr;
                }
              } else {
                j[k] = x;
              }
            },
            v);
      }
      os_ << j.dump() << '\n';
      return;
    }
    if (!header_) {
      for (std::size_t i = 0; i < r.size(); ++i) os_ << (i ? "," : "") << r[i].first;
      os_ << '\n';
      header_ = true;
    }
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) os_ << ',';
      std::visit(
          [&](const auto& x) {
            using X = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<X, std::string>) {
              os_ << csv_field(x);
            } else if constexpr (std::is_same_v<X, double>) {
              os_ << format_double(x);
            } else if constexpr (std::is_same_v<X, long long>) {
              os_ << x;
            }
          },
          r[i].second);
    }
    os_ << '\n';
  }

 private:
  std::ostream& os_;
  bool json_;
  bool header_ = false;
};

struct Globals {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string format = "csv";
  bool json() const { return format == "json-lines"; }
};

unsigned env_threads() {
  const char* s = std::getenv("SE_COUNT_THREADS");
  if (s == nullptr || *s == '\0') return 0;
  char* end = nullptr;
  const unsigned long v = std::strtoul(s, &end, 10);
  if (*end != '\0') throw UsageError("SE_COUNT_THREADS must be a nonnegative integer");
  return static_cast<unsigned>(v);
}

/// Output stream: --out file when given, else `fallback`.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      os_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw UsageError("cannot write '" + path + "'");
      os_ = file_.get();
    }
  }
  std::ostream& get() { return *os_; }
  void close(const std::string& path) {
    if (file_) {
      file_->close();
      if (!*file_) throw Error("error writing '" + path + "'");
    }
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_ = nullptr;
};

// An estimation target: a poset (decision tree) or an explicit fixture tree.
struct Target {
  std::string name;
  std::optional<Poset> poset;
  std::optional<ExplicitTree> tree;
  bool leaf_count_importance = false;  // the example-importance fixture
};

Target load_target(const std::string& poset_path, const std::string& fixture) {
  if (poset_path.empty() == fixture.empty()) throw UsageError("give exactly one of --poset and --fixture");
  Target t;
  if (!poset_path.empty()) {
    t.name = poset_path;
    t.poset = read_poset_file(poset_path);
    return t;
  }
  t.name = fixture;
  if (fixture == "example") {
    t.tree = example_tree();
  } else if (fixture == "example-importance") {
    t.tree = example_tree();
    t.leaf_count_importance = true;
  } else if (fixture == "example-poset") {
    t.poset = example_poset();
  } else {
    throw UsageError("unknown fixture '" + fixture + "' (example, example-importance, example-poset)");
  }
  return t;
}

std::vector<ScriptedChoice> parse_replay(const std::string& text) {
  std::vector<ScriptedChoice> script;
  std::stringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    std::stringstream labels(group);
    std::string label;
    bool first = true;
    while (std::getline(labels, label, ',')) {
      if (label.empty()) throw UsageError("empty label in --replay");
      script.push_back({first ? Phase::weighted : Phase::uniform, label});
      first = false;
    }
    if (first) throw UsageError("empty hypernode in --replay");
  }
  return script;
}

Value count_value(double x) {
  if (std::floor(x) == x && std::fabs(x) < 9.0e15) return static_cast<long long>(x);
  return x;
}

struct EstimateOptions {
  std::string poset, fixture, importance = "uniform", replay;
  std::size_t budget = 1;
  std::size_t runs = 1000;
};

template <TreeOracle T, class Importance>
void estimate_on(const T& tree, const Importance& r, const EstimateOptions& o, const Globals& g,
                 const std::string& name, const std::string& importance_name, std::optional<double> exact,
                 RecordWriter& w) {
  const auto roots = tree.roots();
  const std::span<const NodeOf<T>> root(roots);
  Record rec{{"instance", name}, {"budget", static_cast<long long>(o.budget)}, {"importance", importance_name}};
  if (!o.replay.empty()) {
    ChoiceSource c = ChoiceSource::scripted(parse_replay(o.replay));
    Trajectory<NodeOf<T>> traj;
    const double est = sei_estimate(tree, root, o.budget, r, c, &traj);
    if (!c.exhausted()) throw ScriptError("replay has " + std::to_string(c.remaining()) + " unused choices");
    std::string path, products;
    for (const auto& h : traj.hypernodes) {
      if (!path.empty()) path += ';';
      for (std::size_t i = 0; i < h.nodes.size(); ++i) path += (i ? "," : "") + tree.label(h.nodes[i]);
    }
    for (std::size_t i = 0; i < traj.products.size(); ++i) products += (i ? ";" : "") + format_double(traj.products[i]);
    rec.emplace_back("estimate", est);
    rec.emplace_back("hypernodes", path);
    rec.emplace_back("d_products", products);
  } else {
    if (o.runs < 1) throw UsageError("--runs must be at least 1");
    const RunSummary s = run_many(
        [&](ChoiceSource& c) { return sei_estimate(tree, root, o.budget, r, c); },
        RunConfig{o.runs, g.seed, g.threads, 0});
    auto opt = [](bool ok, double v) { return ok ? Value(v) : Value(std::monostate{}); };
    rec.emplace_back("runs", static_cast<long long>(s.runs));
    rec.emplace_back("mean", s.mean);
    rec.emplace_back("variance", opt(s.variance_defined, s.variance));
    rec.emplace_back("relative_variance", opt(s.relative_defined, s.relative_variance));
    rec.emplace_back("stderr", opt(s.variance_defined, s.standard_error));
  }
  rec.emplace_back("exact", exact ? count_value(*exact) : Value(std::monostate{}));
  w.write(rec);
}

int cmd_estimate(const EstimateOptions& o, bool importance_given, const Globals& g, std::ostream& out) {
  if (o.budget < 1) throw UsageError("--budget must be at least 1");
  const Target t = load_target(o.poset, o.fixture);
  RecordWriter w(out, g.json());
  if (t.poset) {
    const auto kind = parse_importance(o.importance);
    if (!kind) throw UsageError("unknown importance '" + o.importance + "' (uniform, 1, 2, 3, ideal)");
    const LinearExtensionTree tree(*t.poset);
    std::optional<double> exact;
    if (t.poset->size() <= kMaxDpElements) exact = to_double(count_linear_extensions(*t.poset));
    const LeImportance r(tree, *kind);
    estimate_on(tree, r, o, g, t.name, std::string(to_string(*kind)), exact, w);
    return kOk;
  }
  const ExplicitTree& tree = *t.tree;
  NodeWeights r;
  std::string name;
  if (t.leaf_count_importance) {
    if (importance_given && o.importance != "leaf-count") {
      throw UsageError("the example-importance fixture carries its own importance labels");
    }
    r = example_tree_importance();
    name = "leaf-count";
  } else if (o.importance == "uniform") {
    r.weights.assign(tree.size(), 1.0);
    name = "uniform";
  } else if (o.importance == "ideal") {
    r = subtree_cost_weights(tree);
    name = "ideal";
  } else {
    throw UsageError("fixture trees support --importance uniform or ideal");
  }
  estimate_on(tree, r, o, g, t.name, name, exact_forest_cost(tree), w);
  return kOk;
}

int cmd_exact(const std::string& poset, const std::string& fixture, const std::string& method, const Globals& g,
              std::ostream& out) {
  const Target t = load_target(poset, fixture);
  RecordWriter w(out, g.json());
  if (t.tree) {
    if (method == "dp") throw UsageError("--method dp needs a poset");
    w.write({{"instance", t.name}, {"method", std::string("tree")}, {"count", count_value(exact_forest_cost(*t.tree))}});
    return kOk;
  }
  std::optional<std::string> dp, tree;
  if (method == "dp" || method == "both") dp = to_string(count_linear_extensions(*t.poset));
  if (method == "tree" || method == "both") {
    const double c = exact_forest_cost(LinearExtensionTree(*t.poset));
    std::ostringstream s;
    s.precision(0);
    s << std::fixed << c;
    tree = s.str();
  }
  if (dp && tree && *dp != *tree) {
    w.write({{"instance", t.name}, {"method", std::string("both")}, {"count", *dp}, {"tree_count", *tree}});
    throw CheckFailed("dynamic program (" + *dp + ") and tree traversal (" + *tree + ") disagree");
  }
  w.write({{"instance", t.name}, {"method", method}, {"count", dp ? *dp : *tree}});
  return kOk;
}

int cmd_gen_poset(int n, double p, const std::string& path, const Globals& g, std::ostream& out) {
  if (n < 1 || n > kMaxElements) throw UsageError("--n must be in [1, " + std::to_string(kMaxElements) + "]");
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("--p must be in [0, 1]");
  const Poset poset = random_poset(n, p, g.seed);
  write_poset_file(path, poset);
  RecordWriter w(out, g.json());
  Value count = std::monostate{};
  if (n <= kMaxDpElements) count = to_string(count_linear_extensions(poset));
  w.write({{"n", static_cast<long long>(n)},
           {"relations", static_cast<long long>(poset.relation_count())},
           {"covers", static_cast<long long>(poset.cover_relations().size())},
           {"le_count", count},
           {"file", path}});
  return kOk;
}

template <class T>
std::vector<T> parse_list(const std::string& s, const char* what) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    try {
      if (dash != std::string::npos && dash > 0) {
        const long long a = std::stoll(item.substr(0, dash)), b = std::stoll(item.substr(dash + 1));
        if (a > b) throw UsageError(std::string("bad range in ") + what);
        for (long long x = a; x <= b; ++x) out.push_back(static_cast<T>(x));
      } else {
        std::size_t used = 0;
        const long long x = std::stoll(item, &used);
        if (used != item.size() || x < 0) throw UsageError(std::string("bad value in ") + what);
        out.push_back(static_cast<T>(x));
      }
    } catch (const std::logic_error&) {
      throw UsageError(std::string("cannot parse ") + what + " '" + s + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string("empty ") + what);
  return out;
}

struct SweepOptions {
  std::string kind = "n", n_list, budget_list, importances = "uniform,1,2,3", out, dat;
  double p = 0.2, scale = 1.0;
  std::size_t posets = 0, estimates = 0;
  bool full = false, exact_denominator = false, verify = false, timing = false, compare = false;
};

Record sweep_record(const SweepResultRow& r) {
  auto opt = [](const std::optional<double>& x) { return x ? Value(*x) : Value(std::monostate{}); };
  return {{"kind", std::string(to_string(r.kind))},
          {"n", static_cast<long long>(r.n)},
          {"B", static_cast<long long>(r.budget)},
          {"importance", std::string(to_string(r.importance))},
          {"posets", static_cast<long long>(r.posets)},
          {"estimates_per_poset", static_cast<long long>(r.estimates_per_poset)},
          {"mean_rel_var", r.mean_rel_var},
          {"stderr", r.stderr_rel_var},
          {"guard_frac", opt(r.guard_fraction)},
          {"seconds", opt(r.seconds)}};
}

int cmd_sweep(const SweepOptions& o, const Globals& g, std::ostream& out, std::ostream& err) {
  SweepConfig cfg;
  if (o.kind == "n") {
    cfg.kind = SweepKind::over_n;
    cfg.n_values = o.n_list.empty() ? std::vector<int>{10, 15, 20} : parse_list<int>(o.n_list, "--n");
    cfg.budgets = o.budget_list.empty() ? std::vector<std::size_t>{5} : parse_list<std::size_t>(o.budget_list, "--budget");
  } else if (o.kind == "B") {
    cfg.kind = SweepKind::over_budget;
    cfg.n_values = o.n_list.empty() ? std::vector<int>{10} : parse_list<int>(o.n_list, "--n");
    cfg.budgets = o.budget_list.empty() ? parse_list<std::size_t>("1-20", "--budget")
                                        : parse_list<std::size_t>(o.budget_list, "--budget");
  } else {
    throw UsageError("--kind must be n or B");
  }
  cfg.importances.clear();
  std::stringstream ss(o.importances);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto k = parse_importance(item);
    if (!k) throw UsageError("unknown importance '" + item + "'");
    cfg.importances.push_back(*k);
  }
  cfg.edge_probability = o.p;
  cfg.seed = g.seed;
  cfg.scale = o.scale;
  cfg.full_protocol = o.full;
  if (o.posets > 0) cfg.posets = o.posets;
  if (o.estimates > 0) cfg.estimates = o.estimates;
  cfg.exact_denominator = o.exact_denominator;
  cfg.verify = o.verify;
  cfg.timing = o.timing;
  cfg.threads = g.threads;
  try {
    validate(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const auto rows = run_sweep(cfg);
  Output dest(o.out, out);
  if (g.json()) {
    RecordWriter w(dest.get(), true);
    for (const auto& r : rows) w.write(sweep_record(r));
  } else {
    write_sweep_csv(dest.get(), rows);
  }
  dest.close(o.out);
  if (!o.dat.empty()) {
    Output dat(o.dat, out);
    write_sweep_dat(dat.get(), rows);
    dat.close(o.dat);
  }
  if (o.compare) write_comparison(err, compare_importance(rows));
  std::size_t failures = 0;
  for (const auto& r : rows) failures += r.verify_failures;
  if (failures > 0) throw CheckFailed(std::to_string(failures) + " poset estimate means were more than 5 standard errors from the exact count");
  return kOk;
}

int cmd_verify(int max_n, std::size_t max_budget, std::size_t posets, bool mutate, const Globals& g,
               std::ostream& out, std::ostream& err) {
  if (max_n < 1 || max_n > 9) throw UsageError("--max-n must be in [1, 9]");
  if (max_budget < 1 || max_budget > 6) throw UsageError("--max-budget must be in [1, 6]");
  VerifyConfig cfg;
  cfg.max_n = max_n;
  cfg.max_budget = max_budget;
  cfg.posets_per_size = posets;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  cfg.corrupt_correction = mutate;
  const auto results = run_verification(cfg);
  RecordWriter w(out, g.json());
  bool ok = true;
  for (const auto& r : results) {
    w.write({{"check", r.name},
             {"status", std::string(r.passed ? "pass" : "FAIL")},
             {"instances", static_cast<long long>(r.instances)},
             {"detail", r.detail}});
    if (!r.passed) {
      if (ok) err << "first counterexample (" << r.name << "):\n" << r.counterexample << '\n';
      ok = false;
    }
  }
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic enumeration estimators of tree cost and linear-extension counts"};
  app.require_subcommand(1);
  Globals g;
  std::optional<unsigned> threads;
  app.add_option("--seed", g.seed, "Base random seed")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (0 = all cores); default from SE_COUNT_THREADS");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json-lines"}))->capture_default_str();

  auto* gen = app.add_subcommand("gen-poset", "Generate a random poset file");
  int gen_n = 0;
  double gen_p = 0.2;
  std::string gen_out;
  gen->add_option("--n", gen_n, "Number of elements")->required();
  gen->add_option("--p", gen_p, "Probability of each relation v_i > v_j, i < j")->capture_default_str();
  gen->add_option("--out", gen_out, "Output file")->required();

  auto* est = app.add_subcommand("estimate", "Run the importance sampling estimator");
  EstimateOptions eo;
  est->add_option("--poset", eo.poset, "Poset file");
  est->add_option("--fixture", eo.fixture, "example, example-importance or example-poset");
  est->add_option("--budget,-B", eo.budget, "Hypernode budget B")->capture_default_str();
  auto* imp_opt = est->add_option("--importance", eo.importance, "uniform, 1, 2, 3 or ideal")->capture_default_str();
  est->add_option("--runs", eo.runs, "Number of independent estimates")->capture_default_str();
  est->add_option("--replay", eo.replay,
                  "Scripted choices, e.g. 'b,c;d,e;h,i;m': per level the weighted pick, then the uniform picks");

  auto* ex = app.add_subcommand("exact", "Exact linear-extension count or tree cost");
  std::string ex_poset, ex_fixture, ex_method = "dp";
  ex->add_option("--poset", ex_poset, "Poset file");
  ex->add_option("--fixture", ex_fixture, "example, example-importance or example-poset");
  ex->add_option("--method", ex_method, "dp, tree or both")
      ->check(CLI::IsMember({"dp", "tree", "both"}))
      ->capture_default_str();

  auto* sw = app.add_subcommand("sweep", "Relative-variance sweep over n or B");
  SweepOptions so;
  sw->add_option("--kind", so.kind, "n or B")->check(CLI::IsMember({"n", "B"}))->capture_default_str();
  sw->add_option("--n", so.n_list, "Poset sizes, e.g. 10,15,20 or 10-20");
  sw->add_option("--budget,-B", so.budget_list, "Budgets, e.g. 5 or 1-20");
  sw->add_option("--p", so.p, "Relation probability")->capture_default_str();
  sw->add_option("--importance", so.importances, "Comma-separated importance functions")->capture_default_str();
  sw->add_option("--scale", so.scale, "Replicates default to max(64, (n/scale)^2)")->capture_default_str();
  sw->add_option("--posets", so.posets, "Posets per point (overrides the default)");
  sw->add_option("--estimates", so.estimates, "Estimates per poset (overrides the default)");
  sw->add_flag("--full-protocol", so.full, "n^2 posets with n^2 estimates each");
  sw->add_flag("--exact-denominator", so.exact_denominator, "Divide by the exact count squared (n <= 24)");
  sw->add_flag("--verify", so.verify, "Check estimate means against exact counts for n <= 9");
  sw->add_flag("--timing", so.timing, "Fill the seconds column (output is then not reproducible)");
  sw->add_flag("--compare", so.compare, "Print an importance-function ranking to stderr");
  sw->add_option("--out", so.out, "CSV output file (default stdout)");
  sw->add_option("--dat", so.dat, "Gnuplot data file with log10 columns");

  auto* ver = app.add_subcommand("verify", "Check the estimator theory on enumerable instances");
  int max_n = 7;
  std::size_t max_budget = 3, ver_posets = 6;
  bool mutate = false;
  ver->add_option("--max-n", max_n, "Largest random poset")->capture_default_str();
  ver->add_option("--max-budget", max_budget, "Largest budget")->capture_default_str();
  ver->add_option("--posets", ver_posets, "Random posets per size and relation probability")->capture_default_str();
  ver->add_flag("--mutate", mutate, "Use a deliberately wrong D_k formula; the suite must fail");

  std::vector<std::string> argv_store{"secount"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kOk;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << '\n';
      return kUsage;
    }
    g.threads = threads ? *threads : env_threads();

    if (gen->parsed()) return cmd_gen_poset(gen_n, gen_p, gen_out, g, out);
    if (est->parsed()) return cmd_estimate(eo, imp_opt->count() > 0, g, out);
    if (ex->parsed()) return cmd_exact(ex_poset, ex_fixture, ex_method, g, out);
    if (sw->parsed()) return cmd_sweep(so, g, out, err);
    if (ver->parsed()) return cmd_verify(max_n, max_budget, ver_posets, mutate, g, out, err);
  } catch (const ResourceLimitError& e) {
    err << "error: " << e.what() << '\n';
    return kResourceLimit;
  } catch (const CheckFailed& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const EstimatorError& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace secount::cli
