"""twistlab command line.

    twistlab <scenario> --config <path> [--key value]... --out <dir>

Exit status: 0 success, 1 validation failure, 2 configuration error,
3 numerical error.
"""
import argparse
import logging
import os
import sys

from . import _backend
from .config import SCENARIOS, parse_config
from .errors import ConfigError, TwistlabError

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _overrides(extra):
    """Turn ['--key', 'value', '--k2=v2'] into {'key': 'value', 'k2': 'v2'}."""
    out = {}
    i = 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--") or len(tok) < 3:
            raise ConfigError(f"unexpected argument {tok!r}; overrides look like --key value")
        if "=" in tok:
            key, value = tok[2:].split("=", 1)
            i += 1
        else:
            if i + 1 >= len(extra):
                raise ConfigError(f"{tok[2:]}: missing value")
            key, value = tok[2:], extra[i + 1]
            i += 2
        out[key.replace("-", "_")] = value
    return out


def _parser():
    p = argparse.ArgumentParser(
        prog="twistlab",
        description="Structured-light pumped SPDC simulations.",
        epilog="Any other --key value pair overrides the config file.")
    p.add_argument("scenario", choices=SCENARIOS)
    p.add_argument("--config", help="config file (or a shipped preset such as fig6.cfg)")
    p.add_argument("--out", help="output directory (overrides the 'out' key)")
    p.add_argument("-q", "--quiet", action="store_true", help="only report errors")
    return p


def main(argv=None):
    args, extra = _parser().parse_known_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr)
    log = logging.getLogger("twistlab")
    try:
        overrides = _overrides(extra)
        if args.out is not None:
            overrides["out"] = args.out
        cfg = parse_config(args.scenario, args.config, overrides)
        _backend.apply_thread_cap()
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    from . import export, scenarios
    out = cfg.out
    os.makedirs(out, exist_ok=True)
    try:
        result = scenarios.RUNNERS[cfg.scenario](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TwistlabError, ArithmeticError) as exc:
        print(f"{cfg.scenario}: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    ok = True
    if isinstance(result, tuple):
        result, ok = result
    digest = cfg.sha256()
    export.write_csv(os.path.join(out, "manifest.csv"), ("artifact", "config_sha256"),
                     [(name, digest) for name in result])
    with open(os.path.join(out, "config.resolved.cfg"), "w", newline="\n") as fh:
        fh.write(cfg.canonical_text())
    log.info("wrote %d artifacts to %s (config %s)", len(result), out, digest[:12])
    return EXIT_OK if ok else EXIT_VALIDATION


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
