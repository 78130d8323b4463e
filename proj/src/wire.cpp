#include "srpkit/wire.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace srp {

using nlohmann::json;

namespace {

json parse_json(const std::string& line, const char* what) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw AdapterError(std::string("malformed ") + what + ": " + e.what());
  }
}

json call(Transport& t, const json& req) {
  json resp = parse_json(t.request(req.dump()), "adapter response");
  if (resp.contains("error"))
    throw AdapterError(t.identity() + ": " + resp["error"].get<std::string>());
  return resp;
}

AdapterInfo info_from_json(const json& j) {
  AdapterInfo info;
  info.name = j.value("name", std::string("unnamed"));
  info.begin_marker = j.value("begin_marker", std::string());
  std::string base = j.value("log_base", std::string("e"));
  if (base == "e" || base == "natural")
    info.log_base = LogBase::Natural;
  else if (base == "2")
    info.log_base = LogBase::Two;
  else
    throw AdapterError("unknown log_base '" + base + "'");
  info.dim = j.value("dim", 0);
  return info;
}

std::vector<RawSubwordScore> subwords_from_json(const json& resp) {
  std::vector<RawSubwordScore> out;
  try {
    for (const auto& s : resp.at("subwords"))
      out.push_back({s.at("surface").get<std::string>(), s.at("logprob").get<double>(),
                     s.value("begins_word", false)});
  } catch (const json::exception& e) {
    throw AdapterError(std::string("bad score response: ") + e.what());
  }
  return out;
}

json token_json(const ModelToken& t) { return {{"surface", t.surface}, {"begins_word", t.begins_word}}; }

}  // namespace

std::string canonical_request(const std::string& line) { return parse_json(line, "request").dump(); }

ReplayTransport::ReplayTransport(std::string_view jsonl, std::string identity)
    : identity_(std::move(identity)) {
  std::istringstream in{std::string(jsonl)};
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = parse_json(line, "replay record");
    if (j.contains("info")) {
      info_ = j["info"].dump();
      continue;
    }
    if (!j.contains("request") || !j.contains("response"))
      throw AdapterError("replay line " + std::to_string(lineno) + " lacks request/response");
    records_[j["request"].dump()] = j["response"].dump();
  }
  if (info_.empty()) throw AdapterError(identity_ + ": replay file has no info record");
}

std::shared_ptr<ReplayTransport> ReplayTransport::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw AdapterError("cannot open replay file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return std::make_shared<ReplayTransport>(ss.str(), "replay:" + path);
}

std::string ReplayTransport::request(const std::string& line) {
  json req = parse_json(line, "request");
  if (req.value("op", "") == "info") return info_;
  auto it = records_.find(req.dump());
  if (it == records_.end()) return json{{"error", "no replay record for " + req.dump()}}.dump();
  return it->second;
}

PipeTransport::PipeTransport(const std::string& command) : command_(command) {
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
    throw AdapterError(std::string("pipe() failed: ") + std::strerror(errno));
  pid_ = fork();
  if (pid_ < 0) throw AdapterError(std::string("fork() failed: ") + std::strerror(errno));
  if (pid_ == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  signal(SIGPIPE, SIG_IGN);
}

PipeTransport::~PipeTransport() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    waitpid(pid_, &status, 0);
  }
}

std::string PipeTransport::request(const std::string& line) {
  std::lock_guard lock(mutex_);
  std::string msg = line + "\n";
  std::size_t sent = 0;
  while (sent < msg.size()) {
    ssize_t n = write(to_child_, msg.data() + sent, msg.size() - sent);
    if (n <= 0) throw AdapterError(identity() + ": write failed");
    sent += static_cast<std::size_t>(n);
  }
  for (;;) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string out = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return out;
    }
    char buf[4096];
    ssize_t n = read(from_child_, buf, sizeof buf);
    if (n <= 0) throw AdapterError(identity() + ": model server closed the connection");
    buffer_.append(buf, static_cast<std::size_t>(n));
  }
}

RecordingTransport::RecordingTransport(std::shared_ptr<Transport> inner, const std::string& path)
    : inner_(std::move(inner)), path_(path) {}

std::string RecordingTransport::request(const std::string& line) {
  std::string resp = inner_->request(line);
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, header_written_ ? std::ios::app : std::ios::trunc);
  if (!header_written_) {
    out << json{{"info", parse_json(inner_->request(R"({"op":"info"})"), "info")}}.dump() << "\n";
    header_written_ = true;
  }
  json req = parse_json(line, "request");
  if (req.value("op", "") != "info")
    out << json{{"request", req}, {"response", parse_json(resp, "response")}}.dump() << "\n";
  return resp;
}

AdapterInfo fetch_info(Transport& t) { return info_from_json(call(t, json{{"op", "info"}})); }

WireLM::WireLM(std::shared_ptr<Transport> t) : t_(std::move(t)), info_(fetch_info(*t_)) {}

std::vector<RawSubwordScore> WireLM::score(std::string_view text) {
  return subwords_from_json(call(*t_, json{{"op", "score"}, {"text", std::string(text)}}));
}

double WireLM::score_next(std::span<const ModelToken> context, const ModelToken& next) {
  json ctx = json::array();
  for (const auto& c : context) ctx.push_back(token_json(c));
  json resp = call(*t_, json{{"op", "score_next"}, {"context", ctx}, {"next", token_json(next)}});
  try {
    return resp.at("logprob").get<double>();
  } catch (const json::exception& e) {
    throw AdapterError(std::string("bad score_next response: ") + e.what());
  }
}

WireMT::WireMT(std::shared_ptr<Transport> t) : t_(std::move(t)), info_(fetch_info(*t_)) {}

std::vector<RawSubwordScore> WireMT::score(std::string_view source, std::string_view target) {
  return subwords_from_json(call(
      *t_, json{{"op", "score"}, {"src", std::string(source)}, {"tgt", std::string(target)}}));
}

std::vector<ModelToken> WireMT::predict_argmax(std::string_view source, std::string_view target) {
  json resp = call(
      *t_, json{{"op", "predict"}, {"src", std::string(source)}, {"tgt", std::string(target)}});
  std::vector<ModelToken> out;
  try {
    for (const auto& tok : resp.at("tokens"))
      out.push_back({tok.at("surface").get<std::string>(), tok.value("begins_word", false)});
  } catch (const json::exception& e) {
    throw AdapterError(std::string("bad predict response: ") + e.what());
  }
  return out;
}

WireEncoder::WireEncoder(std::shared_ptr<Transport> t) : t_(std::move(t)), info_(fetch_info(*t_)) {}

std::vector<EmbeddedSubword> WireEncoder::embed(std::string_view text, std::string_view lang) {
  json resp =
      call(*t_, json{{"op", "embed"}, {"text", std::string(text)}, {"lang", std::string(lang)}});
  std::vector<EmbeddedSubword> out;
  try {
    for (const auto& s : resp.at("subwords")) {
      EmbeddedSubword e;
      e.surface = s.at("surface").get<std::string>();
      e.span = {s.at("start").get<std::size_t>(), s.at("end").get<std::size_t>()};
      e.vector = s.at("vector").get<std::vector<double>>();
      if (info_.dim > 0 && static_cast<int>(e.vector.size()) != info_.dim)
        throw AdapterError("embedding of '" + e.surface + "' has dimension " +
                           std::to_string(e.vector.size()) + ", declared " +
                           std::to_string(info_.dim));
      out.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw AdapterError(std::string("bad embed response: ") + e.what());
  }
  return out;
}

std::shared_ptr<Transport> open_transport(const std::string& spec) {
  if (spec.rfind("cmd:", 0) == 0) return std::make_shared<PipeTransport>(spec.substr(4));
  if (spec.rfind("replay:", 0) == 0) return ReplayTransport::from_file(spec.substr(7));
  return ReplayTransport::from_file(spec);
}

}  // namespace srp
