#include "edw/object.hpp"

#include "edw/error.hpp"

#include <cmath>

namespace edw {

std::string_view to_string(ObjectStatus status)
{
    return status == ObjectStatus::active ? "active" : "frozen";
}

std::optional<Rational> ArchiveAggregate::exact_mean() const
{
    if (count == 0)
        return std::nullopt;
    return sum / Rational(count);
}

Interval lifecycle_span(WarehouseObject const &object)
{
    Interval span = domain_span(object.current.domain);
    auto widen = [&](TemporalDomain const &d) {
        if (d.empty())
            return;
        Interval s = domain_span(d);
        if (s.start < span.start)
            span.start = s.start;
        if (span.end < s.end)
            span.end = s.end;
    };
    for (auto const &p : object.past)
        widen(p.domain);
    for (auto const &a : object.archives)
        widen(a.domain);
    return span;
}

TemporalDomain lifecycle_domain(WarehouseObject const &object)
{
    TemporalDomain out = object.current.domain;
    for (auto const &p : object.past)
        out = domain_union(out, p.domain);
    for (auto const &a : object.archives)
        out = domain_union(out, a.domain);
    return out;
}

Rational to_rational(double value)
{
    if (!std::isfinite(value))
        throw Error(ErrorKind::TypeMismatch, "non-finite value cannot be archived");
    int exponent = 0;
    double mantissa = std::frexp(value, &exponent);
    // 53 significant bits fit exactly into an integer after scaling.
    auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
    exponent -= 53;
    Rational r = Rational(scaled);
    boost::multiprecision::cpp_int pow2 = 1;
    pow2 <<= std::abs(exponent);
    if (exponent >= 0)
        r *= Rational(pow2);
    else
        r /= Rational(pow2);
    return r;
}

std::string format_rational(Rational const &value)
{
    return boost::multiprecision::numerator(value).str() + "/" + boost::multiprecision::denominator(value).str();
}

Rational parse_rational(std::string const &text)
{
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos)
            return Rational(boost::multiprecision::cpp_int(text));
        boost::multiprecision::cpp_int num(text.substr(0, slash));
        boost::multiprecision::cpp_int den(text.substr(slash + 1));
        if (den == 0)
            throw Error(ErrorKind::CorruptStore, "zero denominator in '" + text + "'");
        return Rational(num, den);
    } catch (std::runtime_error const &e) {
        if (dynamic_cast<Error const *>(&e))
            throw;
        throw Error(ErrorKind::CorruptStore, "bad rational '" + text + "'");
    }
}

namespace {

int order(Value const &a, Value const &b)
{
    if (a.is_number() && b.is_number()) {
        double x = a.as_number(), y = b.as_number();
        return x < y ? -1 : (y < x ? 1 : 0);
    }
    return compare(a, b);
}

Value as_double(Rational const &r)
{
    return Value::real(static_cast<double>(r));
}

} // namespace

ArchiveState merge_archive(std::optional<ArchiveState> const &archive, State const &evicted,
                           std::map<std::string, ArchiveFn> const &archi)
{
    ArchiveState out = archive.value_or(ArchiveState{});
    out.domain = out.domain.empty() ? evicted.domain : domain_union(out.domain, evicted.domain);
    for (auto const &[name, fn] : archi) {
        auto slot = evicted.value.find(name);
        if (slot == evicted.value.end())
            throw Error(ErrorKind::TypeMismatch, "evicted state has no slot for archived property '" + name + "'");
        Value const &v = slot->second;
        auto [it, fresh] = out.aggregates.try_emplace(name);
        ArchiveAggregate &agg = it->second;
        if (fresh)
            agg.fn = fn;
        else if (agg.fn != fn)
            throw Error(ErrorKind::TypeMismatch, "archive of '" + name + "' was built with " +
                                                     std::string(to_string(agg.fn)) + ", not " +
                                                     std::string(to_string(fn)));
        switch (fn) {
        case ArchiveFn::avg:
        case ArchiveFn::sum:
            if (!v.is_null()) {
                if (!v.is_number())
                    throw Error(ErrorKind::TypeMismatch, "archived property '" + name + "' is not numeric");
                agg.sum += v.is_integer() ? Rational(v.as_integer()) : to_rational(v.as_real());
                ++agg.count;
            }
            if (fn == ArchiveFn::sum)
                agg.value = as_double(agg.sum);
            else
                agg.value = agg.count ? as_double(agg.sum / Rational(agg.count)) : Value::null();
            break;
        case ArchiveFn::min:
        case ArchiveFn::max:
            if (!v.is_null()) {
                int c = agg.value.is_null() ? 0 : order(v, agg.value);
                if (agg.value.is_null() || (fn == ArchiveFn::min ? c < 0 : c > 0))
                    agg.value = v;
                ++agg.count;
            }
            break;
        case ArchiveFn::count:
            ++agg.count;
            agg.value = Value::integer(agg.count);
            break;
        case ArchiveFn::last:
            agg.value = v;
            ++agg.count;
            break;
        }
    }
    return out;
}

} // namespace edw
