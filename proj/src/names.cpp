#include "hkrig/names.hpp"

#include <algorithm>
#include <cctype>

namespace hkrig {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    out.erase(std::remove_if(out.begin(), out.end(), [](char c) { return c == '-' || c == '_' || c == '/'; }),
              out.end());
    return out;
}

[[noreturn]] void bad(std::string_view what, std::string_view value) {
    throw Error(ErrorKind::Usage, "unknown " + std::string(what) + " '" + std::string(value) + "'");
}

}  // namespace

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidHyperparameter: return "invalid-hyperparameter";
        case ErrorKind::InvalidInput: return "invalid-input";
        case ErrorKind::Shape: return "shape";
        case ErrorKind::NotPositiveDefinite: return "not-positive-definite";
        case ErrorKind::UnderdeterminedTrend: return "underdetermined-trend";
        case ErrorKind::InsufficientData: return "insufficient-data";
        case ErrorKind::FitFailure: return "fit-failure";
        case ErrorKind::AllInfeasible: return "all-infeasible";
        case ErrorKind::DegenerateValidation: return "degenerate-validation";
        case ErrorKind::NoModel: return "no-model";
        case ErrorKind::Schema: return "schema";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::EmptyDataset: return "empty-dataset";
        case ErrorKind::ConstantInput: return "constant-input";
        case ErrorKind::Usage: return "usage";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

std::string to_string(Family f) {
    switch (f) {
        case Family::Gaussian: return "Gaussian";
        case Family::Exponential: return "Exponential";
        case Family::Matern32: return "Matern32";
        case Family::Matern52: return "Matern52";
        case Family::Linear: return "Linear";
    }
    return "?";
}

std::string to_string(Structure s) { return s == Structure::Separable ? "Separable" : "Ellipsoidal"; }

std::string to_string(Estimation e) { return e == Estimation::MLE ? "MLE" : "CV"; }

std::string to_string(Method m) {
    switch (m) {
        case Method::LocalGradient: return "LocalGradient";
        case Method::HybridGA: return "HybridGA";
        case Method::HybridDE: return "HybridDE";
    }
    return "?";
}

std::string trend_name(TrendKind kind, int degree) {
    switch (kind) {
        case TrendKind::Ordinary: return "Ordinary";
        case TrendKind::Polynomial: return "Polynomial" + std::to_string(degree);
        case TrendKind::External: return "External";
    }
    return "?";
}

Family parse_family(std::string_view s) {
    const std::string k = lower(s);
    if (k == "gaussian") return Family::Gaussian;
    if (k == "exponential") return Family::Exponential;
    if (k == "matern32") return Family::Matern32;
    if (k == "matern52") return Family::Matern52;
    if (k == "linear") return Family::Linear;
    bad("correlation family", s);
}

Structure parse_structure(std::string_view s) {
    const std::string k = lower(s);
    if (k == "separable") return Structure::Separable;
    if (k == "ellipsoidal") return Structure::Ellipsoidal;
    bad("correlation type", s);
}

Estimation parse_estimation(std::string_view s) {
    const std::string k = lower(s);
    if (k == "mle") return Estimation::MLE;
    if (k == "cv") return Estimation::CV;
    bad("estimation method", s);
}

Method parse_method(std::string_view s) {
    const std::string k = lower(s);
    if (k == "localgradient" || k == "bfgs") return Method::LocalGradient;
    if (k == "hybridga" || k == "hga") return Method::HybridGA;
    if (k == "hybridde" || k == "hsade") return Method::HybridDE;
    bad("optimization method", s);
}

int parse_trend_degree(std::string_view s) {
    const std::string k = lower(s);
    if (k == "ordinary") return 0;
    for (const std::string prefix : {"polynomial", "poly"}) {
        if (k.size() == prefix.size() + 1 && k.rfind(prefix, 0) == 0) {
            const char c = k.back();
            if (c >= '1' && c <= '4') return c - '0';
        }
    }
    bad("trend", s);
}

bool parse_bool(std::string_view s) {
    const std::string k = lower(s);
    if (k == "true" || k == "1" || k == "yes" || k == "isotropic") return true;
    if (k == "false" || k == "0" || k == "no" || k == "anisotropic") return false;
    bad("boolean", s);
}

}  // namespace hkrig
