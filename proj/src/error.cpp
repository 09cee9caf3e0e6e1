#include "bracketing/error.hpp"

namespace bracketing {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::domain: return "domain-error";
    case ErrorKind::boundedness: return "boundedness-error";
    case ErrorKind::argument: return "argument-error";
    case ErrorKind::degeneracy: return "degeneracy-error";
    case ErrorKind::assumption: return "assumption-error";
    case ErrorKind::certificate: return "certificate-error";
    case ErrorKind::no_certificate: return "no-certificate";
    case ErrorKind::sampling: return "sampling-error";
    case ErrorKind::coverage: return "coverage-error";
    case ErrorKind::insufficient_data: return "insufficient-data";
    }
    return "error";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
{
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace bracketing
