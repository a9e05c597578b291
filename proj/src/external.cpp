#include "treeduce/external.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace treeduce {

namespace fs = std::filesystem;

namespace {

std::string substitute(const std::string& tmpl, const std::string& key,
                       const std::string& value) {
  std::string out = tmpl;
  size_t at = 0;
  while ((at = out.find(key, at)) != std::string::npos) {
    out.replace(at, key.size(), value);
    at += value.size();
  }
  return out;
}

std::string tail_of_file(const fs::path& path, size_t max_bytes = 2000) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "";
  in.seekg(0, std::ios::end);
  const auto size = static_cast<size_t>(in.tellg());
  const size_t keep = std::min(size, max_bytes);
  in.seekg(static_cast<std::streamoff>(size - keep));
  std::string text(keep, '\0');
  in.read(text.data(), static_cast<std::streamsize>(keep));
  return text;
}

struct TempDir {
  fs::path path;
  TempDir() {
    const auto base = fs::temp_directory_path();
    for (int attempt = 0; attempt < 100; ++attempt) {
      fs::path candidate =
          base / ("treeduce-" + std::to_string(::getpid()) + "-" +
                  std::to_string(std::chrono::steady_clock::now()
                                     .time_since_epoch()
                                     .count()) +
                  "-" + std::to_string(attempt));
      std::error_code ec;
      if (fs::create_directory(candidate, ec)) {
        path = candidate;
        return;
      }
    }
    throw ExternalError("cannot create a temporary directory");
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

// Runs `command` through the shell, stdout+stderr captured to `log_path`.
// Returns (exit status, wall seconds). Throws on timeout.
std::pair<int, double> run_with_timeout(const std::string& command,
                                        const std::string& working_dir,
                                        double timeout_seconds,
                                        const fs::path& log_path) {
  const auto start = std::chrono::steady_clock::now();
  const pid_t pid = ::fork();
  if (pid < 0) throw ExternalError("fork failed: " + std::string(strerror(errno)));
  if (pid == 0) {
    ::setpgid(0, 0);  // own process group so a timeout can kill helpers too
    if (!working_dir.empty() && ::chdir(working_dir.c_str()) != 0) _exit(127);
    FILE* log = std::fopen(log_path.c_str(), "wb");
    if (log) {
      ::dup2(fileno(log), STDOUT_FILENO);
      ::dup2(fileno(log), STDERR_FILENO);
    }
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }

  while (true) {
    int status = 0;
    const pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid) {
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
              .count();
      if (WIFEXITED(status)) return {WEXITSTATUS(status), seconds};
      if (WIFSIGNALED(status))
        throw ExternalError("parser command killed by signal " +
                            std::to_string(WTERMSIG(status)));
      return {-1, seconds};
    }
    if (done < 0)
      throw ExternalError("waitpid failed: " + std::string(strerror(errno)));
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (elapsed > timeout_seconds) {
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, nullptr, 0);
      throw ExternalError("parser command timed out after " +
                          std::to_string(timeout_seconds) + "s: " + command);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
}

void check_alignment(const Treebank& input, const Treebank& output) {
  if (input.sentences.size() != output.sentences.size())
    throw ExternalError(
        "output misaligned: expected " + std::to_string(input.sentences.size()) +
        " sentences, parser returned " + std::to_string(output.sentences.size()));
  for (size_t i = 0; i < input.sentences.size(); ++i) {
    const Sentence& a = input.sentences[i];
    const Sentence& b = output.sentences[i];
    if (a.tokens.size() != b.tokens.size())
      throw ExternalError("output misaligned at sentence " + std::to_string(i + 1) +
                          ": expected " + std::to_string(a.tokens.size()) +
                          " tokens, parser returned " +
                          std::to_string(b.tokens.size()));
    for (size_t j = 0; j < a.tokens.size(); ++j) {
      if (a.tokens[j].form != b.tokens[j].form)
        throw ExternalError("output misaligned at sentence " +
                            std::to_string(i + 1) + " token " +
                            std::to_string(j + 1) + ": form '" +
                            b.tokens[j].form + "' differs from input '" +
                            a.tokens[j].form + "'");
    }
  }
}

}  // namespace

std::pair<Treebank, double> run_external(const ExternalParserSpec& spec,
                                         const Treebank& input) {
  if (spec.command.empty()) throw ExternalError("empty parser command");
  TempDir dir;
  const fs::path in_path = dir.path / "input.conllu";
  const fs::path out_path = dir.path / "output.conllu";
  const fs::path log_path = dir.path / "parser.log";
  write_conllu_file(input, in_path.string());

  std::string command = substitute(spec.command, "{input}", in_path.string());
  command = substitute(command, "{output}", out_path.string());
  command = substitute(command, "{model}", spec.model_path);

  const auto [exit_code, seconds] =
      run_with_timeout(command, spec.working_dir, spec.timeout_seconds, log_path);
  if (exit_code != 0) {
    std::string diag = tail_of_file(log_path);
    throw ExternalError("parser command exited with status " +
                        std::to_string(exit_code) + ": " + command +
                        (diag.empty() ? "" : "\n--- captured output ---\n" + diag));
  }
  if (!fs::exists(out_path))
    throw ExternalError("parser command produced no output file: " + command);

  Treebank output;
  try {
    output = read_conllu_file(out_path.string());
  } catch (const ConlluError& e) {
    throw ExternalError(std::string("parser output unreadable: ") + e.what());
  }
  check_alignment(input, output);
  return {std::move(output), seconds};
}

}  // namespace treeduce
