#include "bracketing/rng.hpp"

#include <cmath>

namespace bracketing {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(splitmix64(seed) ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL)))
{
}

std::uint64_t CounterRng::at(std::uint64_t index) const
{
    return splitmix64(key_ ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double CounterRng::uniform_open0() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

double CounterRng::normal()
{
    const double r = std::sqrt(-2.0 * std::log(uniform_open0()));
    const double theta = 2.0 * M_PI * uniform();
    return r * std::cos(theta);
}

}  // namespace bracketing
