#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "srpkit/cli.hpp"
#include "srpkit/table_io.hpp"

using namespace srp;
namespace fs = std::filesystem;

namespace {

const std::string kExcerpt = std::string(SRPKIT_FIXTURE_DIR) + "/excerpt";

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "srpkit");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  char* envp[] = {nullptr};
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), envp, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("srpkit_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const WordRow& by_id(const std::vector<WordRow>& rows, const std::string& id) {
  for (const auto& r : rows)
    if (r.word_id.str() == id) return r;
  throw std::runtime_error("no row " + id);
}

Run annotate(const fs::path& out) {
  return cli({"annotate", "--replay", kExcerpt + "/replay.conf", "--workers", "2", "-i",
              kExcerpt + "/pairs.tsv", "-o", out.string()});
}

}  // namespace

TEST(Cli, AnnotateExcerptWithReplay) {
  auto dir = scratch("annotate");
  auto r = annotate(dir);
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = std::get<std::vector<WordRow>>(read_table_file((dir / "vertical.tsv.gz").string(), TableFormat::Vertical));
  const auto& its = by_id(rows, "SI_SP_DE_EN_030-21:001");
  EXPECT_EQ(its.conllu.token, "It's");
  EXPECT_NEAR(its.srp_base_gpt2.value_or(NAN), 13.0, 1e-9);
  EXPECT_NEAR(its.srp_ft_gpt2.value_or(NAN), 12.5, 1e-9);
  EXPECT_NEAR(its.srp_base_mt.value_or(NAN), 35.3, 1e-9);
  EXPECT_NEAR(its.srp_ft_mt.value_or(NAN), 38.4, 1e-9);
  EXPECT_EQ(its.aligned_word, (std::vector<std::string>{"Begonnen", "ist"}));
  EXPECT_EQ(its.speaker_id, "fEN3");
  const auto& very = by_id(rows, "SI_SP_DE_EN_030-21:006");
  EXPECT_NEAR(very.srp_base_mt.value_or(NAN), 7.6, 1e-9);
  const auto& wi = by_id(rows, "SI_SP_DE_EN_030-21:007");
  EXPECT_EQ(wi.aligned_word, (std::vector<std::string>{"guten", "Absichten"}));
  EXPECT_NEAR(wi.srp_base_gpt2.value_or(NAN), 16.7, 1e-9);
  const auto& fp = by_id(rows, "SI_SP_DE_EN_030-21:003");
  EXPECT_EQ(fp.conllu.pos, "FP");
  EXPECT_FALSE(fp.srp_base_gpt2);
  EXPECT_FALSE(by_id(rows, "SI_SP_DE_EN_030-21:001:1").srp_base_gpt2);
  const auto& src = by_id(rows, "ORG_SP_DE_EN_030-21:001");
  EXPECT_EQ(src.conllu.token, "Begonnen");
  EXPECT_EQ(src.speaker_id, "mDE7");

  auto wide = std::get<std::vector<SegmentPairRecord>>(read_table_file((dir / "wide.tsv.gz").string(), TableFormat::Wide));
  ASSERT_EQ(wide.size(), 1u);
  EXPECT_TRUE(wide[0].base_mt_AvS);
  EXPECT_TRUE(wide[0].base_bleu);
  auto lg = std::get<std::vector<SegmentRecord>>(read_table_file((dir / "long.tsv.gz").string(), TableFormat::Long));
  ASSERT_EQ(lg.size(), 2u);
  fs::remove_all(dir);
}

TEST(Cli, ReRunIsByteIdentical) {
  auto a = scratch("det_a"), b = scratch("det_b");
  ASSERT_EQ(annotate(a).code, 0);
  ASSERT_EQ(annotate(b).code, 0);
  for (const char* f : {"vertical.tsv.gz", "long.tsv.gz", "wide.tsv.gz"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, AggregateFromVertical) {
  auto dir = scratch("aggregate");
  ASSERT_EQ(annotate(dir).code, 0);
  auto agg = dir / "agg";
  auto r = cli({"aggregate", "-i", (dir / "vertical.tsv.gz").string(), "-o", agg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto a = std::get<std::vector<SegmentRecord>>(read_table_file((dir / "long.tsv.gz").string(), TableFormat::Long));
  auto b = std::get<std::vector<SegmentRecord>>(read_table_file((agg / "long.tsv.gz").string(), TableFormat::Long));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].seg_id, b[k].seg_id);
    EXPECT_EQ(a[k].base_gpt_AvS, b[k].base_gpt_AvS);
    EXPECT_EQ(a[k].wc_tok, b[k].wc_tok);
  }
  fs::remove_all(dir);
}

TEST(Cli, NormalizeWritesTable) {
  auto dir = scratch("normalize");
  {
    std::ofstream f(dir / "in.tsv");
    f << "seg_id\traw\nSI_SP_DE_EN_001-01\twe / euh go [g:o]\n";
  }
  auto r = cli({"normalize", "-i", (dir / "in.tsv").string(), "-o", dir.string(), "--set", "gzip=false"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto text = slurp(dir / "normalized.tsv");
  EXPECT_NE(text.find("We euh go"), std::string::npos) << text;
  EXPECT_EQ(text.rfind("# srpkit normalize", 0), 0u);
  fs::remove_all(dir);
}

TEST(Cli, UsageErrors) {
  auto r = cli({"frobnicate"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("\"usage\""), std::string::npos) << r.err;
  EXPECT_EQ(cli({}).code, 2);
  auto m = cli({"annotate"});
  EXPECT_EQ(m.code, 2);
}

TEST(Cli, ModuleErrorIsJson) {
  auto dir = scratch("err");
  {
    std::ofstream f(dir / "bad.tsv");
    f << "src_seg_id\ttgt_seg_id\tsrc_text\ttgt_text\nORG_XX_DE_EN_001-01\tSI_SP_DE_EN_001-01\ta\tb\n";
  }
  auto r = cli({"annotate", "-i", (dir / "bad.tsv").string(), "-o", dir.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("{\"error\":", 0), 0u) << r.err;
  EXPECT_NE(r.err.find("\"component\":\"mode\""), std::string::npos) << r.err;
  fs::remove_all(dir);
}
