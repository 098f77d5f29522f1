// qcurve: command-line front end. One JSON object per result line on stdout,
// diagnostics (including the effective configuration) on stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <sstream>

#include "qcurve/average.hpp"
#include "qcurve/checker.hpp"
#include "qcurve/frey.hpp"

using namespace qcurve;
using Json = nlohmann::ordered_json;

namespace {

struct Config {
  unsigned threads = 1;
  int precision = 20;
  std::string cache_dir;
};

void emit(const Json& j) { std::cout << j.dump() << '\n'; }

std::string num(const Real& x, const Config& c) { return decimal(x, c.precision); }
std::string num(double x, const Config& c) { return decimal(x, std::min(c.precision, 17)); }

Json al_json(const std::map<i64, int>& al) {
  Json j = Json::object();
  for (auto [q, s] : al) j[std::to_string(q)] = s;
  return j;
}

Json pairing_json(const PairingEstimate& e, const Config& c) {
  Json j;
  j["level"] = e.level;
  j["l1"] = e.l1.tag();
  j["l2"] = e.l2.tag();
  j["method"] = std::string(to_string(e.method));
  j["value"] = num(e.value, c);
  j["error"] = num(e.error, c);
  j["empirical_error"] = num(e.empirical_error, c);
  return j;
}

int run_frey(const std::string& a_str, const std::string& b_str, const Config& c) {
  mpz_class A(a_str), B(b_str);
  Json j;
  j["command"] = "frey";
  j["A"] = A.get_str();
  j["B"] = B.get_str();
  mpz_class r;
  mpz_fdiv_r_ui(r.get_mpz_t(), B.get_mpz_t(), 4);
  if (r == 1) {
    B = -B;
    j["normalized_B"] = B.get_str();
  }
  FreyCurve e = build_frey(A, B);
  CurveInvariants inv = invariants(e);
  j["a2"] = e.a2().str();
  j["a4"] = e.a4().str();
  j["E4"] = inv.E4.str();
  j["Delta"] = inv.Delta.str();
  j["j"] = inv.j.str();
  ReductionReport rep = tate_at_pi(e);
  j["val_pi_delta"] = rep.ord_delta;
  j["kodaira"] = rep.kodaira;
  j["f_local"] = rep.f_local;
  j["f_induced"] = rep.f_induced;
  j["branch"] = rep.branch;
  j["serre_N"] = rep.serre_N;
  j["serre_k"] = rep.serre_k;
  j["serre_eps"] = rep.serre_eps;
  IsogenyCheck iso = isogeny_check(e);
  j["isogeny_ok"] = iso.ok;
  j["isogeny_residual"] = num(iso.max_relative_residual, c);
  emit(j);
  return 0;
}

int run_search(unsigned long p, long bound, const Config& c) {
  auto sols = search_solutions(p, bound, static_cast<int>(c.threads));
  std::size_t nontrivial = 0;
  for (const auto& s : sols) {
    Json j;
    j["command"] = "search";
    j["A"] = s.A.get_str();
    j["B"] = s.B.get_str();
    j["C"] = s.C.get_str();
    j["p"] = s.p;
    j["trivial"] = s.trivial;
    if (!s.trivial) ++nontrivial;
    emit(j);
  }
  Json j;
  j["command"] = "search";
  j["p"] = p;
  j["bound"] = bound;
  j["solutions"] = sols.size();
  j["nontrivial"] = nontrivial;
  emit(j);
  return 0;
}

int run_forms(i64 level, bool new_only, std::size_t n_max, const Config& c) {
  NewformSpace space(level);
  Json head;
  head["command"] = "forms";
  head["level"] = level;
  head["cuspidal_dimension"] = space.space().cuspidal_dimension();
  head["new_dimension"] = space.new_dimension();
  head["n_max"] = n_max;
  emit(head);
  auto forms = space.newforms(n_max);
  for (std::size_t i = 0; i < forms.size(); ++i) {
    const Newform& f = forms[i];
    Json j;
    j["command"] = "forms";
    j["level"] = level;
    j["index"] = i;
    j["block"] = f.block;
    j["embedding"] = f.embedding_index;
    j["charpoly_prime"] = f.charpoly_prime;
    j["charpoly"] = poly_string(f.charpoly);
    j["al_signs"] = al_json(f.al_signs);
    j["precision"] = c.precision;
    Json a = Json::array();
    for (std::size_t n = 1; n < f.a.size(); ++n) a.push_back(num(f.a[n], c));
    j["a"] = a;
    emit(j);
  }
  if (!new_only) {
    for (i64 m : divisors(level)) {
      if (m == level || genus_x0(m) == 0) continue;
      NewformSpace lower(m);
      if (lower.new_dimension() == 0) continue;
      Json j;
      j["command"] = "forms";
      j["level"] = level;
      j["old_from"] = m;
      j["new_dimension_at_source"] = lower.new_dimension();
      j["multiplicity"] = divisor_count(level / m);
      emit(j);
    }
  }
  return 0;
}

int run_lvalue(i64 level, std::size_t index, i64 q, const Config& c) {
  QuadCharacter chi = QuadCharacter::of_conductor(q);
  NewformSpace space(level);
  const i64 twisted = gcd(level, q) == 1 ? level * q * q : 8 * level;
  const std::size_t n_max = lvalue_terms_needed(twisted, Real("1e-30")) * 5 / 4 + 8;
  auto forms = space.newforms(n_max);
  if (index >= forms.size())
    throw Error(ErrorKind::InvalidArgument, "level " + std::to_string(level) + " has " +
                                                std::to_string(forms.size()) + " newforms");
  const Newform& f = forms[index];
  LValueResult r = l_value_at_1(f, chi);
  Json j;
  j["command"] = "lvalue";
  j["level"] = level;
  j["index"] = index;
  j["twist"] = q;
  j["al_signs"] = al_json(f.al_signs);
  j["twisted_level"] = r.twisted_level;
  j["root_number"] = r.sign;
  j["value"] = num(r.value, c);
  j["trunc_error"] = decimal(r.trunc_error, 6);
  j["terms_used"] = r.terms_used;
  emit(j);
  return 0;
}

int run_average(i64 level, i64 m, i64 q, const std::string& method, i64 c_max, const Config& c) {
  PairingEstimate e;
  if (method == "direct") {
    DirectOptions o;
    o.petersson.threads = c.threads;
    e = dual_pairing_direct(level, Functional::coefficient(m), Functional::l_twist(q), o);
  } else {
    e = dual_pairing_trace(level, m, QuadCharacter::of_conductor(q), {c_max, 1e-6});
  }
  Json j;
  j["command"] = "average";
  j.update(pairing_json(e, c));
  emit(j);
  return 0;
}

int run_pnew(i64 p, i64 m, i64 q, const std::string& method, i64 c_max, const Config& c) {
  DirectOptions o;
  o.petersson.threads = c.threads;
  PairingMethod pm = method == "direct" ? PairingMethod::DirectEigenbasis : PairingMethod::TraceFormula;
  PairingEstimate e = pnew_pairing(p, m, QuadCharacter::of_conductor(q), pm, {c_max, 1e-6}, o);
  Json j;
  j["command"] = "pnew";
  j["p"] = p;
  j.update(pairing_json(e, c));
  emit(j);
  return 0;
}

int run_verdict(i64 p, const std::string& constants, const Config& c) {
  VerdictConstants k;
  if (!constants.empty()) {
    std::vector<double> v;
    std::stringstream ss(constants);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
    if (v.size() != 3) throw Error(ErrorKind::InvalidArgument, "--constants expects three numbers a,b,c");
    k = {v[0], v[1], v[2]};
  }
  Verdict v = large_prime_verdict(p, k);
  Json j;
  j["command"] = "verdict";
  j["p"] = p;
  j["constants"] = {k.main_dev, k.level_p_bound, k.convexity_bound_at_p};
  j["value"] = num(v.value, c);
  j["pass"] = v.pass;
  j["convexity_bound"] = num(v.convexity_bound, c);
  j["constants_cover_convexity"] = v.constants_cover_convexity;
  emit(j);
  return 0;
}

int run_check(i64 p, i64 max_p, const Config& c) {
  CheckOptions opt;
  opt.max_p = max_p;
  opt.cache_dir = c.cache_dir.empty() ? NewformCache::default_dir() : std::filesystem::path(c.cache_dir);
  CheckReport r = check_prime(p, opt);
  Json j;
  j["command"] = "check";
  j.update(to_json(r));
  emit(j);
  return r.verdict == CheckVerdict::WitnessFound ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qcurve: Frey Q-curves, modular symbols, twisted L-values and Petersson averages"};
  app.require_subcommand(1);
  app.fallthrough();
  Config cfg;
  app.add_option("--threads", cfg.threads, "worker threads")->default_val(1)->check(CLI::Range(1u, 256u));
  app.add_option("--precision", cfg.precision, "significant digits in numeric output")
      ->default_val(20)
      ->check(CLI::Range(1, 45));
  app.add_option("--cache-dir", cfg.cache_dir, std::string("newform cache (default $") + kCacheDirEnv +
                                                   " or ./qcurve-cache)");

  std::string a_str, b_str;
  auto* frey = app.add_subcommand("frey", "invariants, reduction at 1+i and Serre level");
  frey->add_option("--a", a_str)->required();
  frey->add_option("--b", b_str)->required();

  unsigned long p_search = 0;
  long bound = 0;
  auto* search = app.add_subcommand("search", "primitive A^4 + B^2 = C^p with |A|, |B| <= bound");
  search->add_option("--p", p_search)->required()->check(CLI::PositiveNumber);
  search->add_option("--bound", bound)->required()->check(CLI::NonNegativeNumber);

  i64 level = 0, m = 1, q = 4, c_max = 6000, p = 0, max_p = 31;
  std::size_t n_max = 50, index = 0;
  bool new_only = false;
  std::string method = "direct", constants;

  auto* forms = app.add_subcommand("forms", "newforms of a level");
  forms->add_option("--level", level)->required()->check(CLI::PositiveNumber);
  forms->add_flag("--new", new_only, "newforms only");
  forms->add_option("--nmax", n_max)->default_val(50);

  auto* lvalue = app.add_subcommand("lvalue", "L(f (x) chi, 1)");
  lvalue->add_option("--level", level)->required()->check(CLI::PositiveNumber);
  lvalue->add_option("--index", index)->default_val(0);
  lvalue->add_option("--twist", q)->default_val(4);

  auto* average = app.add_subcommand("average", "dual pairing (a_m, L_chi)_N");
  average->add_option("--level", level)->required()->check(CLI::PositiveNumber);
  average->add_option("--m", m)->default_val(1)->check(CLI::PositiveNumber);
  average->add_option("--twist", q)->default_val(4);
  average->add_option("--method", method)->default_val("direct")->check(CLI::IsMember({"direct", "trace"}));
  average->add_option("--c-max", c_max)->default_val(6000);

  auto* pnew = app.add_subcommand("pnew", "p-new part of (a_m, L_chi)_{p^2}");
  pnew->add_option("--p", p)->required();
  pnew->add_option("--m", m)->default_val(1)->check(CLI::PositiveNumber);
  pnew->add_option("--twist", q)->default_val(4);
  pnew->add_option("--method", method)->default_val("trace")->check(CLI::IsMember({"direct", "trace"}));
  pnew->add_option("--c-max", c_max)->default_val(6000);

  auto* verdict = app.add_subcommand("verdict", "p >= 211 verdict arithmetic");
  verdict->add_option("--p", p)->required();
  verdict->add_option("--constants", constants, "main_dev,level_p_bound,convexity_bound_at_p");

  auto* check = app.add_subcommand("check", "witness search at levels p^2 and 2p^2");
  check->add_option("--p", p)->required();
  check->add_option("--max-p", max_p)->default_val(31);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  Json conf;
  conf["config"] = {{"subcommand", app.get_subcommands().front()->get_name()},
                    {"threads", cfg.threads},
                    {"precision", cfg.precision},
                    {"cache_dir", cfg.cache_dir.empty() ? NewformCache::default_dir().string() : cfg.cache_dir}};
  std::cerr << conf.dump() << '\n';

  try {
    if (*frey) return run_frey(a_str, b_str, cfg);
    if (*search) return run_search(p_search, bound, cfg);
    if (*forms) return run_forms(level, new_only, n_max, cfg);
    if (*lvalue) return run_lvalue(level, index, q, cfg);
    if (*average) return run_average(level, m, q, method, c_max, cfg);
    if (*pnew) return run_pnew(p, m, q, method, c_max, cfg);
    if (*verdict) return run_verdict(p, constants, cfg);
    if (*check) return run_check(p, max_p, cfg);
  } catch (const Error& e) {
    std::cerr << Json{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}}.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
  return 1;
}
