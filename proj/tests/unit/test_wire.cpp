#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "srpkit/wire.hpp"

using namespace srp;
namespace fs = std::filesystem;

namespace {

const char* kReplay =
    R"({"info": {"name": "tiny", "begin_marker": "Ġ", "log_base": "e"}})" "\n"
    R"({"request": {"text": "a b", "op": "score"}, "response": {"subwords": [{"surface": "a", "logprob": -1.0, "begins_word": true}, {"surface": "Ġb", "logprob": -2.0, "begins_word": true}]}})" "\n"
    R"({"request": {"op": "score", "text": "x"}, "response": {"error": "model exploded"}})" "\n";

const char* kServer =
    "while IFS= read -r l; do case \"$l\" in "
    "*'\"op\":\"info\"'*) echo '{\"name\":\"sh\",\"begin_marker\":\"\",\"log_base\":\"2\"}';; "
    "*) echo '{\"subwords\":[{\"surface\":\"z\",\"logprob\":-1.5,\"begins_word\":true}]}';; "
    "esac; done";

}  // namespace

TEST(Wire, CanonicalRequestSortsKeys) {
  EXPECT_EQ(canonical_request(R"({ "text" : "a", "op":"score" })"), R"({"op":"score","text":"a"})");
}

TEST(Wire, ReplayAnswersAndReportsMisses) {
  auto t = std::make_shared<ReplayTransport>(kReplay);
  EXPECT_EQ(t->size(), 2u);
  WireLM lm(t);
  EXPECT_EQ(lm.info().name, "tiny");
  EXPECT_EQ(lm.info().begin_marker, "\xC4\xA0");
  EXPECT_EQ(lm.info().log_base, LogBase::Natural);
  auto s = lm.score("a b");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].logprob, -2.0);
  EXPECT_THROW(lm.score("not recorded"), AdapterError);
  EXPECT_THROW(lm.score("x"), AdapterError);
  EXPECT_THROW(ReplayTransport("{\"request\":{}}"), AdapterError);
}

TEST(Wire, RecordingRoundTripsThroughReplay) {
  auto path = fs::temp_directory_path() / ("srpkit_rec_" + std::to_string(::getpid()) + ".jsonl");
  {
    auto rec = std::make_shared<RecordingTransport>(std::make_shared<ReplayTransport>(kReplay), path.string());
    WireLM lm(rec);
    lm.score("a b");
  }
  WireLM again(ReplayTransport::from_file(path.string()));
  EXPECT_EQ(again.info().name, "tiny");
  EXPECT_EQ(again.score("a b").size(), 2u);
  fs::remove(path);
}

TEST(Wire, PipeTransportTalksToChild) {
  auto t = open_transport(std::string("cmd:") + kServer);
  WireLM lm(t);
  EXPECT_EQ(lm.info().name, "sh");
  EXPECT_EQ(lm.info().log_base, LogBase::Two);
  for (int k = 0; k < 3; ++k) {
    auto s = lm.score("anything");
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0].surface, "z");
    EXPECT_EQ(s[0].logprob, -1.5);
  }
}

TEST(Wire, DeadChildIsAdapterError) {
  EXPECT_THROW(
      {
        auto t = open_transport("cmd:exit 0");
        WireLM lm(t);
      },
      AdapterError);
}
