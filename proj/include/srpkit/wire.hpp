#pragma once

// Line-delimited JSON wire contract shared by out-of-process model servers
// and replay files.
//
// Requests (one JSON object per line):
//   {"op":"info"}
//   {"op":"score","text":"..."}                         causal LM
//   {"op":"score_next","context":[tok...],"next":tok}   causal LM, tok = {"surface","begins_word"}
//   {"op":"score","src":"...","tgt":"..."}              MT, teacher forcing
//   {"op":"predict","src":"...","tgt":"..."}            MT, argmax under gold prefixes
//   {"op":"embed","text":"...","lang":"EN"}             encoder
// Responses:
//   info     {"name","begin_marker","log_base":"e"|"2","dim"}
//   score    {"subwords":[{"surface","logprob","begins_word"}...]}
//   score_next {"logprob":x}
//   predict  {"tokens":[{"surface","begins_word"}...]}
//   embed    {"subwords":[{"surface","start","end","vector":[...]}...]}
//   failure  {"error":"message"}
//
// A replay file holds {"info":{...}} on its first line followed by
// {"request":{...},"response":{...}} records.

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "srpkit/adapters.hpp"

namespace srp {

class Transport {
 public:
  virtual ~Transport() = default;
  // Sends one request line, returns the response line.
  virtual std::string request(const std::string& line) = 0;
  virtual std::string identity() const = 0;
};

// Normalised request key: keys sorted, no whitespace.
std::string canonical_request(const std::string& line);

class ReplayTransport : public Transport {
 public:
  explicit ReplayTransport(std::string_view jsonl, std::string identity = "replay");
  static std::shared_ptr<ReplayTransport> from_file(const std::string& path);

  std::string request(const std::string& line) override;
  std::string identity() const override { return identity_; }
  std::size_t size() const { return records_.size(); }

 private:
  std::string identity_;
  std::string info_;
  std::map<std::string, std::string> records_;
};

// Talks to a child process over stdin/stdout, one line per message.
class PipeTransport : public Transport {
 public:
  explicit PipeTransport(const std::string& command);
  ~PipeTransport() override;
  PipeTransport(const PipeTransport&) = delete;
  PipeTransport& operator=(const PipeTransport&) = delete;

  std::string request(const std::string& line) override;
  std::string identity() const override { return "pipe:" + command_; }

 private:
  std::string command_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::mutex mutex_;
};

// Forwards to another transport and appends every exchange to a replay file.
class RecordingTransport : public Transport {
 public:
  RecordingTransport(std::shared_ptr<Transport> inner, const std::string& path);
  std::string request(const std::string& line) override;
  std::string identity() const override { return inner_->identity(); }

 private:
  std::shared_ptr<Transport> inner_;
  std::string path_;
  bool header_written_ = false;
  std::mutex mutex_;
};

AdapterInfo fetch_info(Transport& t);

class WireLM : public CausalLMAdapter {
 public:
  explicit WireLM(std::shared_ptr<Transport> t);
  AdapterInfo info() const override { return info_; }
  std::vector<RawSubwordScore> score(std::string_view text) override;
  double score_next(std::span<const ModelToken> context, const ModelToken& next) override;

 private:
  std::shared_ptr<Transport> t_;
  AdapterInfo info_;
};

class WireMT : public MTAdapter {
 public:
  explicit WireMT(std::shared_ptr<Transport> t);
  AdapterInfo info() const override { return info_; }
  std::vector<RawSubwordScore> score(std::string_view source, std::string_view target) override;
  std::vector<ModelToken> predict_argmax(std::string_view source, std::string_view target) override;

 private:
  std::shared_ptr<Transport> t_;
  AdapterInfo info_;
};

class WireEncoder : public EncoderAdapter {
 public:
  explicit WireEncoder(std::shared_ptr<Transport> t);
  AdapterInfo info() const override { return info_; }
  std::vector<EmbeddedSubword> embed(std::string_view text, std::string_view lang) override;

 private:
  std::shared_ptr<Transport> t_;
  AdapterInfo info_;
};

// Opens "replay:<path>" / "cmd:<command>" / plain path (treated as replay).
std::shared_ptr<Transport> open_transport(const std::string& spec);

}  // namespace srp
