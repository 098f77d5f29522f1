#include <gtest/gtest.h>

#include <fstream>

#include "qcurve/checker.hpp"

using namespace qcurve;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("qcurve_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(d);
  return d;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Cache, RoundTripLevel121) {
  auto dir = fresh_dir("roundtrip");
  NewformCache cache(dir);
  NewformSpace s(121);
  std::vector<Newform> forms = s.newforms(200);
  forms[0].petersson_norm = Real("0.35228512345678901234567890123456789");
  forms[0].petersson_error = Real("3e-9");
  cache.store(121, forms);
  std::vector<Newform> back = cache.load(121);
  ASSERT_EQ(back.size(), forms.size());
  for (std::size_t i = 0; i < forms.size(); ++i) {
    EXPECT_EQ(back[i].level, forms[i].level);
    EXPECT_EQ(back[i].block, forms[i].block);
    EXPECT_EQ(back[i].embedding_index, forms[i].embedding_index);
    EXPECT_EQ(back[i].charpoly_prime, forms[i].charpoly_prime);
    EXPECT_EQ(back[i].charpoly, forms[i].charpoly);
    EXPECT_EQ(back[i].al_signs, forms[i].al_signs);
    EXPECT_EQ(back[i].a, forms[i].a);
    EXPECT_EQ(back[i].petersson_norm, forms[i].petersson_norm);
    EXPECT_EQ(back[i].petersson_error, forms[i].petersson_error);
  }
  // storing the loaded records again gives the same bytes
  std::ifstream f1(cache.path_for(121));
  std::string first((std::istreambuf_iterator<char>(f1)), {});
  cache.store(121, back);
  std::ifstream f2(cache.path_for(121));
  std::string second((std::istreambuf_iterator<char>(f2)), {});
  EXPECT_EQ(first, second);
  std::filesystem::remove_all(dir);
}

TEST(Cache, AbsentLevelIsEmpty) {
  NewformCache cache(fresh_dir("absent"));
  EXPECT_TRUE(cache.load(289).empty());
}

TEST(Cache, CorruptionAndSchema) {
  auto dir = fresh_dir("corrupt");
  NewformCache cache(dir);
  NewformSpace s(11);
  cache.store(11, s.newforms(50));
  const auto path = cache.path_for(11);
  std::ifstream in(path);
  std::string all((std::istreambuf_iterator<char>(in)), {});
  in.close();

  std::ofstream(path, std::ios::trunc) << all.substr(0, all.size() / 2);
  EXPECT_EQ(kind_of([&] { cache.load(11); }), ErrorKind::CorruptRecord);

  // header only: the record count no longer matches
  std::ofstream(path, std::ios::trunc) << all.substr(0, all.find('\n') + 1);
  EXPECT_EQ(kind_of([&] { cache.load(11); }), ErrorKind::CorruptRecord);

  std::string flipped = all;
  const auto pos = flipped.find("\"a\":[\"0");
  ASSERT_NE(pos, std::string::npos);
  flipped[pos + 6] = '1';
  std::ofstream(path, std::ios::trunc) << flipped;
  EXPECT_EQ(kind_of([&] { cache.load(11); }), ErrorKind::CorruptRecord);

  OrderedJson head;
  head["schema_version"] = kCacheSchemaVersion + 1;
  head["level"] = 11;
  head["records"] = 0;
  std::ofstream(path, std::ios::trunc) << detail::with_checksum(head) << '\n';
  EXPECT_EQ(kind_of([&] { cache.load(11); }), ErrorKind::SchemaMismatch);
  std::filesystem::remove_all(dir);
}

TEST(Cache, EnvironmentOverride) {
  ::setenv(kCacheDirEnv, "/tmp/qcurve_env_dir", 1);
  EXPECT_EQ(NewformCache::default_dir(), std::filesystem::path("/tmp/qcurve_env_dir"));
  ::unsetenv(kCacheDirEnv);
  EXPECT_EQ(NewformCache::default_dir(), std::filesystem::path("qcurve-cache"));
}

TEST(Check, Preconditions) {
  EXPECT_EQ(kind_of([] { check_prime(13); }), ErrorKind::PreconditionPrime);
  EXPECT_EQ(kind_of([] { check_prime(11); }), ErrorKind::PreconditionPrime);
  EXPECT_EQ(kind_of([] { check_prime(21); }), ErrorKind::NotPrime);
  EXPECT_EQ(kind_of([] { check_prime(37); }), ErrorKind::BudgetExceeded);
}

TEST(Check, Prime17) {
  auto dir = fresh_dir("p17");
  CheckOptions opt;
  opt.cache_dir = dir;
  CheckReport r = check_prime(17, opt);
  EXPECT_EQ(r.searched_levels, (std::vector<i64>{289, 578}));
  ASSERT_EQ(r.verdict, CheckVerdict::WitnessFound);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->level, 289);
  EXPECT_EQ(r.witness->al_signs.at(289), 1);
  EXPECT_GT(abs(*r.witness->l_value), 10 * r.witness->l_error);
  EXPECT_EQ(r.candidates.size(), 15u + 23u);
  for (const auto& c : r.candidates) {
    if (c.al_signs.at(289) == -1) {
      EXPECT_EQ(c.status, "skipped");
      EXPECT_EQ(c.reason, "sign forces L = 0");
    }
    if (c.status != "skipped") EXPECT_EQ(c.root_number, 1);
  }
  EXPECT_TRUE(verify_witness(r, dir));

  // second run reads the cache and reports the same bytes
  CheckReport again = check_prime(17, opt);
  EXPECT_EQ(to_json(r).dump(), to_json(again).dump());
  std::filesystem::remove_all(dir);
}
