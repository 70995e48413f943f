#include "lgwm/io.h"

#include <fstream>
#include <sstream>

#include "lgwm/error.h"

namespace lgwm {

const char *ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyInstruction: return "EmptyInstruction";
    case ErrorCode::kOutOfGrammar: return "OutOfGrammar";
    case ErrorCode::kMalformedTree: return "MalformedTree";
    case ErrorCode::kEmptyRegistry: return "EmptyRegistry";
    case ErrorCode::kUnknownClassifier: return "UnknownClassifier";
    case ErrorCode::kNonFiniteScore: return "NonFiniteScore";
    case ErrorCode::kNoTargetObject: return "NoTargetObject";
    case ErrorCode::kAmbiguousRelation: return "AmbiguousRelation";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kCorpusDomainMismatch: return "CorpusDomainMismatch";
    case ErrorCode::kDivergedLoss: return "DivergedLoss";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInvalidFraction: return "InvalidFraction";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::string &path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path);
}

}  // namespace lgwm
