#ifndef LGWM_ERROR_H_
#define LGWM_ERROR_H_

#include <stdexcept>
#include <string>

namespace lgwm {

// Every failure raised by the library carries one of these codes so callers
// (notably the CLI) can map domain failures and misuse to exit statuses.
enum class ErrorCode {
  kEmptyInstruction,
  kOutOfGrammar,
  kMalformedTree,
  kEmptyRegistry,
  kUnknownClassifier,
  kNonFiniteScore,
  kNoTargetObject,
  kAmbiguousRelation,
  kTooLarge,
  kCorpusDomainMismatch,
  kDivergedLoss,
  kInvalidSpec,
  kInvalidConfig,
  kInvalidFraction,
  kSchemaMismatch,
  kIo,
};

const char *ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lgwm

#endif  // LGWM_ERROR_H_
