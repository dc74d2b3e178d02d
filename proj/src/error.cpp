#include "edw/error.hpp"

#include <sstream>

namespace edw {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::UnknownUnit: return "UnknownUnit";
    case ErrorKind::MixedUnits: return "MixedUnits";
    case ErrorKind::InvalidInterval: return "InvalidInterval";
    case ErrorKind::InvalidInstant: return "InvalidInstant";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownFunction: return "UnknownFunction";
    case ErrorKind::UnknownInterface: return "UnknownInterface";
    case ErrorKind::InverseMismatch: return "InverseMismatch";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::DanglingReference: return "DanglingReference";
    case ErrorKind::InverseViolation: return "InverseViolation";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::CompositionShared: return "CompositionShared";
    case ErrorKind::UnknownClass: return "UnknownClass";
    case ErrorKind::UnknownOid: return "UnknownOid";
    case ErrorKind::UnknownEnvironment: return "UnknownEnvironment";
    case ErrorKind::InheritanceCycle: return "InheritanceCycle";
    case ErrorKind::PropertyConflict: return "PropertyConflict";
    case ErrorKind::RelationClosure: return "RelationClosure";
    case ErrorKind::EnvironmentOverlap: return "EnvironmentOverlap";
    case ErrorKind::EmptyEnvironment: return "EmptyEnvironment";
    case ErrorKind::FilterOutsideEnvironment: return "FilterOutsideEnvironment";
    case ErrorKind::ArchiveNotTemporal: return "ArchiveNotTemporal";
    case ErrorKind::UnknownFilterProperty: return "UnknownFilterProperty";
    case ErrorKind::MissingRetentionBound: return "MissingRetentionBound";
    case ErrorKind::UnresolvedSourceProperty: return "UnresolvedSourceProperty";
    case ErrorKind::TypeInferenceError: return "TypeInferenceError";
    case ErrorKind::UnknownProperty: return "UnknownProperty";
    case ErrorKind::UnknownPath: return "UnknownPath";
    case ErrorKind::AmbiguousProperty: return "AmbiguousProperty";
    case ErrorKind::NameCollision: return "NameCollision";
    case ErrorKind::NonNumericAggregate: return "NonNumericAggregate";
    case ErrorKind::TypeMismatchInPredicate: return "TypeMismatchInPredicate";
    case ErrorKind::NotCommonProperty: return "NotCommonProperty";
    case ErrorKind::EmptyOperands: return "EmptyOperands";
    case ErrorKind::InvalidSchema: return "InvalidSchema";
    case ErrorKind::DanglingRelationTarget: return "DanglingRelationTarget";
    case ErrorKind::AmbiguousRelationTarget: return "AmbiguousRelationTarget";
    case ErrorKind::DuplicateKey: return "DuplicateKey";
    case ErrorKind::NonMonotonicInstant: return "NonMonotonicInstant";
    case ErrorKind::UnitMismatch: return "UnitMismatch";
    case ErrorKind::NotSpecificProperty: return "NotSpecificProperty";
    case ErrorKind::FrozenObject: return "FrozenObject";
    case ErrorKind::NonEmptyStore: return "NonEmptyStore";
    case ErrorKind::Io: return "Io";
    case ErrorKind::CorruptStore: return "CorruptStore";
    case ErrorKind::Locked: return "Locked";
    }
    return "Unknown";
}

namespace {

std::string compose(ErrorKind kind, std::string const &message, SourcePos pos)
{
    std::ostringstream out;
    if (pos.valid())
        out << pos.line << ':' << pos.column << ": ";
    out << to_string(kind) << ": " << message;
    return out.str();
}

std::string summarize(std::vector<Diagnostic> const &diagnostics)
{
    std::ostringstream out;
    out << diagnostics.size() << " diagnostic(s)";
    if (!diagnostics.empty())
        out << "; first: " << diagnostics.front().format();
    return out.str();
}

} // namespace

Error::Error(ErrorKind kind, std::string const &message, SourcePos pos)
    : std::runtime_error(compose(kind, message, pos)), kind_(kind), pos_(pos), detail_(message)
{
}

std::string Diagnostic::format(std::string_view file) const
{
    std::ostringstream out;
    if (!file.empty())
        out << file << ':';
    if (pos.valid())
        out << pos.line << ':' << pos.column << ": ";
    else if (!file.empty())
        out << ' ';
    out << to_string(kind);
    if (!class_name.empty()) {
        out << " [" << class_name;
        if (!property.empty())
            out << '.' << property;
        out << ']';
    }
    out << ": " << message;
    return out.str();
}

DiagnosticError::DiagnosticError(std::vector<Diagnostic> diagnostics)
    : Error(diagnostics.empty() ? ErrorKind::InvalidSchema : diagnostics.front().kind,
            summarize(diagnostics),
            diagnostics.empty() ? SourcePos{} : diagnostics.front().pos),
      diagnostics_(std::move(diagnostics))
{
}

} // namespace edw
