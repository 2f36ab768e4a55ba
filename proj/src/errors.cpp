#include "threatgraph/errors.hpp"

namespace threatgraph {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::BadKind: return "BadKind";
    case Errc::WrongPointCount: return "WrongPointCount";
    case Errc::DegenerateQuad: return "DegenerateQuad";
    case Errc::BadConfig: return "BadConfig";
    case Errc::NonMonotonicFrame: return "NonMonotonicFrame";
    case Errc::MixedIdMode: return "MixedIdMode";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::AtInfinity: return "AtInfinity";
    case Errc::OutOfOrderFrame: return "OutOfOrderFrame";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::NoDefinedClasses: return "NoDefinedClasses";
    case Errc::MissingFrame: return "MissingFrame";
    case Errc::OutsideCalibratedRegion: return "OutsideCalibratedRegion";
    case Errc::IoFailure: return "IoFailure";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

std::string decorate(Errc code, const std::string& message, std::optional<std::size_t> line,
                     const std::string& path) {
  std::string out(to_string(code));
  if (!path.empty() || line) {
    out += " (";
    out += path.empty() ? "<input>" : path;
    if (line) out += ":" + std::to_string(*line);
    out += ")";
  }
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(Errc code, const std::string& message, std::optional<std::size_t> line, std::string path)
    : std::runtime_error(decorate(code, message, line, path)),
      code_(code),
      line_(line),
      path_(std::move(path)) {}

}  // namespace threatgraph
