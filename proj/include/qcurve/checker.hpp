#pragma once

// Witness search: a newform at level p^2 with w_p = +1, or at level 2p^2 with w_p = +1 and
// w_2 = -1, whose twist by the character of conductor 4 has L(f (x) chi, 1) != 0.
// Newforms are cached per level as JSON lines.

#include <openssl/evp.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcurve/lfunc.hpp"
#include "qcurve/newforms.hpp"

namespace qcurve {

using OrderedJson = nlohmann::ordered_json;

inline constexpr int kCacheSchemaVersion = 1;
inline constexpr const char* kCacheDirEnv = "QCURVE_CACHE_DIR";

/// Decimal string that reads back to the same Real.
inline std::string exact_decimal(const Real& x) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<Real>::max_digits10) << std::scientific << x;
  return os.str();
}

inline std::string sha256_hex(const std::string& s) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(s.data(), s.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

namespace detail {

inline std::string with_checksum(OrderedJson j) {
  j.erase("checksum");
  const std::string body = j.dump();
  j["checksum"] = sha256_hex(body);
  return j.dump();
}

inline OrderedJson parse_checked(const std::string& line, const std::string& where) {
  OrderedJson j;
  try {
    j = OrderedJson::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::CorruptRecord, where + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("checksum") || !j.contains("schema_version"))
    throw Error(ErrorKind::CorruptRecord, where + ": missing fields");
  if (j["schema_version"] != kCacheSchemaVersion)
    throw Error(ErrorKind::SchemaMismatch, where + ": schema " + j["schema_version"].dump());
  const std::string sum = j["checksum"].get<std::string>();
  OrderedJson body = j;
  body.erase("checksum");
  if (sha256_hex(body.dump()) != sum) throw Error(ErrorKind::CorruptRecord, where + ": checksum mismatch");
  return j;
}

}  // namespace detail

inline OrderedJson newform_to_json(const Newform& f, std::size_t form_index) {
  OrderedJson j;
  j["schema_version"] = kCacheSchemaVersion;
  j["level"] = f.level;
  j["form_index"] = form_index;
  j["block"] = f.block;
  j["embedding"] = f.embedding_index;
  j["charpoly_prime"] = f.charpoly_prime;
  OrderedJson cp = OrderedJson::array();
  for (const mpq_class& c : f.charpoly) cp.push_back(c.get_str());
  j["charpoly"] = cp;
  OrderedJson al = OrderedJson::object();
  for (auto [q, s] : f.al_signs) al[std::to_string(q)] = s;
  j["al_signs"] = al;
  j["precision_digits"] = std::numeric_limits<Real>::digits10;
  OrderedJson a = OrderedJson::array();
  for (const Real& x : f.a) a.push_back(exact_decimal(x));
  j["a"] = a;
  j["petersson_norm"] = f.petersson_norm ? OrderedJson(exact_decimal(*f.petersson_norm)) : OrderedJson(nullptr);
  j["petersson_error"] = exact_decimal(f.petersson_error);
  return j;
}

inline Newform newform_from_json(const OrderedJson& j) {
  try {
    Newform f;
    f.level = j.at("level").get<i64>();
    f.block = j.at("block").get<std::size_t>();
    f.embedding_index = j.at("embedding").get<std::size_t>();
    f.charpoly_prime = j.at("charpoly_prime").get<i64>();
    for (const auto& c : j.at("charpoly")) f.charpoly.emplace_back(c.get<std::string>());
    for (const auto& [q, s] : j.at("al_signs").items()) f.al_signs[std::stoll(q)] = s.get<int>();
    for (const auto& x : j.at("a")) f.a.emplace_back(x.get<std::string>());
    if (!j.at("petersson_norm").is_null()) f.petersson_norm = Real(j.at("petersson_norm").get<std::string>());
    f.petersson_error = Real(j.at("petersson_error").get<std::string>());
    return f;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::CorruptRecord, std::string("bad newform record: ") + e.what());
  }
}

/// One file per level: a header line {schema_version, level, records, checksum} then one line per form.
class NewformCache {
 public:
  explicit NewformCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  /// $QCURVE_CACHE_DIR, else ./qcurve-cache.
  static std::filesystem::path default_dir() {
    const char* env = std::getenv(kCacheDirEnv);
    return env && *env ? std::filesystem::path(env) : std::filesystem::path("qcurve-cache");
  }

  const std::filesystem::path& dir() const { return dir_; }

  std::filesystem::path path_for(i64 level) const {
    return dir_ / ("level_" + std::to_string(level) + ".jsonl");
  }

  void store(i64 level, const std::vector<Newform>& forms) const {
    std::filesystem::create_directories(dir_);
    const auto target = path_for(level);
    const auto tmp = target.string() + ".tmp." + std::to_string(::getpid());
    {
      std::ofstream out(tmp, std::ios::trunc);
      OrderedJson head;
      head["schema_version"] = kCacheSchemaVersion;
      head["level"] = level;
      head["records"] = forms.size();
      out << detail::with_checksum(head) << '\n';
      for (std::size_t i = 0; i < forms.size(); ++i) {
        if (forms[i].level != level) throw Error(ErrorKind::InvalidArgument, "record level mismatch");
        out << detail::with_checksum(newform_to_json(forms[i], i)) << '\n';
      }
      out.flush();
      if (!out) throw Error(ErrorKind::CorruptRecord, "write failed: " + tmp);
    }
    std::filesystem::rename(tmp, target);
  }

  /// Empty when the level has never been stored.
  std::vector<Newform> load(i64 level) const {
    const auto file = path_for(level);
    std::vector<Newform> out;
    if (!std::filesystem::exists(file)) return out;
    std::ifstream in(file);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::CorruptRecord, file.string() + ": empty file");
    OrderedJson head = detail::parse_checked(line, file.string() + ":1");
    if (head.value("level", i64(0)) != level) throw Error(ErrorKind::CorruptRecord, "header level mismatch");
    const std::size_t count = head.at("records").get<std::size_t>();
    std::size_t row = 1;
    while (std::getline(in, line)) {
      ++row;
      OrderedJson j = detail::parse_checked(line, file.string() + ":" + std::to_string(row));
      if (j.at("form_index").get<std::size_t>() != out.size())
        throw Error(ErrorKind::CorruptRecord, "records out of order");
      out.push_back(newform_from_json(j));
    }
    if (out.size() != count)
      throw Error(ErrorKind::CorruptRecord, file.string() + ": expected " + std::to_string(count) + " records, read " +
                                                std::to_string(out.size()));
    return out;
  }

 private:
  std::filesystem::path dir_;
};

enum class CheckVerdict { WitnessFound, NoWitness, Inconclusive };

inline std::string_view to_string(CheckVerdict v) {
  switch (v) {
    case CheckVerdict::WitnessFound: return "WitnessFound";
    case CheckVerdict::NoWitness: return "NoWitness";
    case CheckVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct CandidateEntry {
  i64 level = 0;
  std::size_t form_index = 0;
  std::map<i64, int> al_signs;
  std::string status;  // witness, nonzero, inconclusive, skipped
  std::string reason;
  std::optional<Real> l_value;
  Real l_error = 0;
  int root_number = 0;
};

struct CheckReport {
  i64 p = 0;
  std::vector<i64> searched_levels;
  std::optional<CandidateEntry> witness;
  CheckVerdict verdict = CheckVerdict::NoWitness;
  std::vector<CandidateEntry> candidates;
};

struct CheckOptions {
  i64 max_p = 31;                  // feasibility budget
  Real certify_factor = Real(10);  // |L| > factor * error
  Real tol = Real("1e-30");
  std::optional<std::filesystem::path> cache_dir;
};

inline OrderedJson to_json(const CandidateEntry& c) {
  OrderedJson j;
  j["level"] = c.level;
  j["form_index"] = c.form_index;
  OrderedJson al = OrderedJson::object();
  for (auto [q, s] : c.al_signs) al[std::to_string(q)] = s;
  j["al_signs"] = al;
  j["status"] = c.status;
  j["reason"] = c.reason;
  j["l_value"] = c.l_value ? OrderedJson(decimal(*c.l_value, 30)) : OrderedJson(nullptr);
  j["l_error"] = decimal(c.l_error, 6);
  j["root_number"] = c.root_number;
  return j;
}

inline OrderedJson to_json(const CheckReport& r) {
  OrderedJson j;
  j["p"] = r.p;
  j["searched_levels"] = r.searched_levels;
  j["verdict"] = std::string(to_string(r.verdict));
  j["witness"] = r.witness ? to_json(*r.witness) : OrderedJson(nullptr);
  OrderedJson c = OrderedJson::array();
  for (const auto& e : r.candidates) c.push_back(to_json(e));
  j["candidates"] = c;
  return j;
}

/// Coefficients needed for the twisted L-value and its sign fit at level 16 p^2.
inline std::size_t check_n_max(i64 p, const Real& tol) {
  return lvalue_terms_needed(16 * p * p, tol) * 5 / 4 + 8;
}

/// Newforms of a level from the cache, computed and stored when absent or too short.
inline std::vector<Newform> cached_newforms(const NewformCache& cache, i64 level, std::size_t n_max) {
  std::vector<Newform> forms = cache.load(level);
  bool ok = !forms.empty();
  for (const Newform& f : forms) ok = ok && f.n_max() >= n_max;
  if (ok) return forms;
  NewformSpace space(level);
  forms = space.newforms(n_max);
  if (!forms.empty()) cache.store(level, forms);
  return forms;
}

inline CheckReport check_prime(i64 p, const CheckOptions& opt = {}) {
  if (!is_prime(p)) throw Error(ErrorKind::NotPrime, std::to_string(p) + " is not prime");
  if (p <= 13) throw Error(ErrorKind::PreconditionPrime, "p must exceed 13");
  if (p > opt.max_p)
    throw Error(ErrorKind::BudgetExceeded, "p = " + std::to_string(p) + " exceeds the budget p <= " +
                                               std::to_string(opt.max_p) + "; nothing searched");
  NewformCache cache(opt.cache_dir.value_or(NewformCache::default_dir()));
  const QuadCharacter chi = QuadCharacter::of_conductor(4);
  const std::size_t n_max = check_n_max(p, opt.tol);
  const i64 pp = p * p;
  CheckReport report;
  report.p = p;
  bool unresolved = false;
  for (i64 level : {pp, 2 * pp}) {
    report.searched_levels.push_back(level);
    std::vector<Newform> forms = cached_newforms(cache, level, n_max);
    for (std::size_t i = 0; i < forms.size(); ++i) {
      const Newform& f = forms[i];
      CandidateEntry e;
      e.level = level;
      e.form_index = i;
      e.al_signs = f.al_signs;
      const int wp = f.al_signs.at(pp);
      if (wp == -1) {
        e.status = "skipped";
        e.reason = "sign forces L = 0";
      } else if (level != pp && f.al_signs.at(2) != -1) {
        e.status = "skipped";
        e.reason = "w_2 = +1 outside the searched pattern";
      } else {
        LValueResult r = l_value_at_1(f, chi, opt.tol);
        e.l_value = r.value;
        e.l_error = r.trunc_error;
        e.root_number = r.sign;
        if (abs(r.value) > opt.certify_factor * r.trunc_error) {
          e.status = report.witness ? "nonzero" : "witness";
        } else {
          e.status = "inconclusive";
          e.reason = "|L| <= " + decimal(opt.certify_factor, 3) + " * error";
          unresolved = true;
        }
        if (!report.witness && e.status == "witness") report.witness = e;
      }
      report.candidates.push_back(std::move(e));
    }
  }
  report.verdict = report.witness ? CheckVerdict::WitnessFound
                                  : (unresolved ? CheckVerdict::Inconclusive : CheckVerdict::NoWitness);
  return report;
}

/// Recompute the witness L-value from cached coefficients; true when it matches the report.
inline bool verify_witness(const CheckReport& r, const std::filesystem::path& cache_dir,
                           const Real& tol = Real("1e-30")) {
  if (!r.witness || !r.witness->l_value) return false;
  const CandidateEntry& w = *r.witness;
  std::vector<Newform> forms = NewformCache(cache_dir).load(w.level);
  if (w.form_index >= forms.size()) return false;
  const Newform& f = forms[w.form_index];
  if (f.al_signs != w.al_signs) return false;
  LValueResult l = l_value_at_1(f, QuadCharacter::of_conductor(4), tol);
  return l.sign == w.root_number && abs(l.value - *w.l_value) <= l.trunc_error + w.l_error &&
         abs(l.value) > 10 * l.trunc_error;
}

}  // namespace qcurve
