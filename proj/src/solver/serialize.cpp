#include "eislab/solver/serialize.hpp"

#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "eislab/app/csv.hpp"
#include "eislab/core/error.hpp"

namespace eislab {
namespace {

constexpr char kMagic[8] = {'E', 'I', 'S', 'L', 'A', 'B', 'C', '1'};

void text_vec(std::ostream& os, const char* name, const std::vector<double>& v) {
  os << name << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << format_double(v[i]);
  os << "]\n";
}

void text_curvature(std::ostream& os, const char* name, const Curvature& c) {
  os << name << '=' << (c.kind() == Curvature::Kind::Crra ? "crra:" : "cara:") << format_double(c.parameter())
     << '\n';
}

void text_aggregator(std::ostream& os, const Aggregator& f) {
  switch (f.family()) {
    case AggregatorFamily::EpsteinZin:
      os << "ez " << format_double(f.beta()) << ' ' << format_double(f.psi()) << '\n';
      break;
    case AggregatorFamily::CobbDouglas:
      os << "cd " << format_double(f.beta()) << '\n';
      break;
    case AggregatorFamily::Custom:
      os << "custom " << f.describe() << '\n';
      break;
  }
}

class Out {
 public:
  explicit Out(std::ostream& os) : os_(os) {}
  void u64(std::uint64_t x) { os_.write(reinterpret_cast<const char*>(&x), sizeof x); }
  void f64(double x) { os_.write(reinterpret_cast<const char*>(&x), sizeof x); }
  void vec(const std::vector<double>& v) {
    u64(v.size());
    for (double x : v) f64(x);
  }
  void idx(const std::vector<std::size_t>& v) {
    u64(v.size());
    for (std::size_t x : v) u64(x);
  }

 private:
  std::ostream& os_;
};

class In {
 public:
  explicit In(std::istream& is) : is_(is) {}
  std::uint64_t u64() {
    std::uint64_t x = 0;
    read(&x, sizeof x);
    return x;
  }
  double f64() {
    double x = 0;
    read(&x, sizeof x);
    return x;
  }
  std::vector<double> vec() {
    std::vector<double> v(size());
    for (auto& x : v) x = f64();
    return v;
  }
  std::vector<std::size_t> idx() {
    std::vector<std::size_t> v(size());
    for (auto& x : v) x = u64();
    return v;
  }

 private:
  std::size_t size() {
    const std::uint64_t n = u64();
    if (n > (1u << 26)) throw Error("corrupt solution cache");
    return static_cast<std::size_t>(n);
  }
  void read(void* p, std::size_t n) {
    is_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!is_) throw Error("truncated solution cache");
  }
  std::istream& is_;
};

}  // namespace

void write_solution_csv(std::ostream& os, const Solution& sol) {
  const bool income = sol.plan().has_income;
  std::vector<std::string> header{"t"};
  if (income) header.push_back("p");
  for (const char* h : {"w", "V", "c", "theta"}) header.emplace_back(h);
  CsvWriter csv(os, header);
  if (!sol.tabulated()) throw PreconditionError("closed-form solutions have no tabulated nodes");
  for (std::size_t t = 0; t < sol.horizon(); ++t) {
    const PeriodTables& tb = sol.tables(t);
    for (std::size_t r = 0; r < tb.value.size(); ++r) {
      const double p = tb.permanent.empty() ? sol.initial_permanent() : tb.permanent[r];
      const double scale = sol.plan().reduced ? p : 1.0;
      const auto& nodes = tb.value[r].nodes();
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        std::vector<CsvWriter::Field> row{t};
        if (income) row.emplace_back(p);
        row.emplace_back(nodes[j] * scale);
        row.emplace_back(tb.value[r].values()[j] * scale);
        row.emplace_back(tb.consumption[r][j] * scale);
        row.emplace_back(tb.portfolio[r][j]);
        csv.row(row);
      }
    }
  }
}

std::string canonical_text(const Setting& s, const GridPlan& plan) {
  std::ostringstream os;
  os << "T=" << s.horizon() << '\n';
  for (std::size_t t = 0; t < s.horizon(); ++t) {
    const Period& p = s.periods[t];
    os << "period " << t << '\n';
    text_aggregator(os, p.aggregator);
    os << "ce " << static_cast<int>(p.ce.kind()) << '\n';
    text_curvature(os, "risk", p.ce.risk());
    if (p.ce.kind() == CertaintyEquivalent::Kind::SmoothAmbiguity) {
      text_curvature(os, "ambiguity", p.ce.ambiguity());
      text_vec(os, "mu", p.ce.mu());
    }
    for (const auto& pr : p.ce.priors()) text_vec(os, "prior", pr);
    text_vec(os, "probs", p.next.probs);
    for (const auto& r : p.next.returns) text_vec(os, "returns", r);
    if (p.next.income) {
      text_vec(os, "tau", p.next.income->transitory);
      text_vec(os, "eta", p.next.income->permanent);
    }
    if (p.next.entrepreneur) os << "entrepreneur " << p.next.entrepreneur->technology->describe() << '\n';
  }
  text_vec(os, "terminal", s.terminal.coef);
  os << "intercept " << format_double(s.terminal.intercept) << '\n';
  if (s.income) {
    os << "income " << format_double(s.income->initial_permanent) << ' ' << s.income->borrowing_constraint << '\n';
  }
  os << "plan reduced=" << plan.reduced << " income=" << plan.has_income << '\n';
  for (const auto& g : plan.wealth) {
    os << "grid " << format_double(g.w_min) << ' ' << format_double(g.w_max) << ' ' << g.n << ' '
       << static_cast<int>(g.order) << '\n';
  }
  for (const auto& p : plan.permanent) text_vec(os, "permanent", p);
  return os.str();
}

std::uint64_t setting_hash(const Setting& s, const GridPlan& plan) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical_text(s, plan)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void save_cache(const std::filesystem::path& file, const Solution& sol, std::uint64_t key) {
  if (!sol.tabulated()) throw PreconditionError("only tabulated solutions are cached");
  std::ofstream os(file, std::ios::binary);
  if (!os) throw Error("cannot write cache file " + file.string());
  os.write(kMagic, sizeof kMagic);
  Out out(os);
  out.u64(key);
  const GridPlan& plan = sol.plan();
  out.u64(plan.reduced);
  out.u64(plan.has_income);
  out.u64(plan.wealth.size());
  for (const auto& g : plan.wealth) {
    out.f64(g.w_min);
    out.f64(g.w_max);
    out.u64(g.n);
    out.u64(static_cast<std::uint64_t>(g.order));
  }
  out.u64(plan.permanent.size());
  for (const auto& p : plan.permanent) out.vec(p);
  for (std::size_t t = 0; t < sol.horizon(); ++t) {
    const PeriodTables& tb = sol.tables(t);
    out.vec(tb.permanent);
    out.u64(tb.value.size());
    for (std::size_t r = 0; r < tb.value.size(); ++r) {
      out.vec(tb.value[r].nodes());
      out.vec(tb.value[r].values());
      out.f64(tb.value[r].at_zero());
      out.vec(tb.continuation[r].values());
      out.f64(tb.continuation[r].at_zero());
      out.vec(tb.consumption[r]);
      out.idx(tb.portfolio[r]);
      out.idx(tb.continuation_portfolio[r]);
    }
  }
  if (!os) throw Error("failed writing cache file " + file.string());
}

std::optional<Solution> load_cache(const std::filesystem::path& file, const Setting& s, std::uint64_t key) {
  std::ifstream is(file, std::ios::binary);
  if (!is) return std::nullopt;
  char magic[sizeof kMagic];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0) return std::nullopt;
  In in(is);
  if (in.u64() != key) return std::nullopt;
  GridPlan plan;
  plan.reduced = in.u64() != 0;
  plan.has_income = in.u64() != 0;
  const std::uint64_t T = in.u64();
  if (T != s.horizon()) return std::nullopt;
  for (std::uint64_t t = 0; t < T; ++t) {
    WealthGrid g;
    g.w_min = in.f64();
    g.w_max = in.f64();
    g.n = static_cast<std::size_t>(in.u64());
    g.order = static_cast<Interpolation>(in.u64());
    plan.wealth.push_back(g);
  }
  const std::uint64_t np = in.u64();
  for (std::uint64_t i = 0; i < np; ++i) plan.permanent.push_back(in.vec());
  std::vector<PeriodTables> periods(T);
  for (std::uint64_t t = 0; t < T; ++t) {
    PeriodTables& tb = periods[t];
    tb.permanent = in.vec();
    const std::uint64_t rows = in.u64();
    const Interpolation order = plan.wealth[t].order;
    for (std::uint64_t r = 0; r < rows; ++r) {
      const auto nodes = in.vec();
      const auto V = in.vec();
      const double V0 = in.f64();
      const auto v = in.vec();
      const double v0 = in.f64();
      tb.value.emplace_back(nodes, V, V0, order);
      tb.continuation.emplace_back(nodes, v, v0, order);
      tb.consumption.push_back(in.vec());
      tb.portfolio.push_back(in.idx());
      tb.continuation_portfolio.push_back(in.idx());
    }
  }
  return make_tabulated_solution(std::make_shared<const Setting>(s), std::move(plan), std::move(periods));
}

Solution solve_cached(const Setting& s, const GridPlan& plan, const SolveOptions& opt,
                      const std::filesystem::path& dir) {
  const std::uint64_t key = setting_hash(s, plan);
  std::ostringstream name;
  name << "solution-" << std::hex << key << ".bin";
  const auto file = dir / name.str();
  if (auto hit = load_cache(file, s, key)) return std::move(*hit);
  Solution sol = solve_backward(s, plan, opt);
  std::filesystem::create_directories(dir);
  save_cache(file, sol, key);
  return sol;
}

}  // namespace eislab
