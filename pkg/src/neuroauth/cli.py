"""Command-line front end.

Two families of subcommands: resource mode (``access``) and reset mode
(``reset``, ``log``), plus ``enroll``, ``export-token`` and ``replicate``.
Every prompt can be replaced by ``--password``/``--time-ms`` flags so the whole
surface is scriptable.

Exit status: 0 granted/success, 1 denied, 2 locked or intruder declared,
3 usage or I/O error.
"""

from __future__ import annotations

import argparse
import getpass
import secrets
import sys
import time
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import MissingToken, NeuroAuthError, NoTerminal, ResetDenied
from .experiments import replicate_experiments
from .guard import GuardConfig, GuardDecision, Layer, evaluate_attempt
from .trainer import MAX_SEED, TrainingConfig
from . import vault

EXIT_OK = 0
EXIT_DENIED = 1
EXIT_LOCKED = 2
EXIT_ERROR = 3


@dataclass(frozen=True)
class TimedEntry:
    text: str
    insertion_ms: int


class UsageError(Exception):
    pass


def prompt_with_timing(prompt: str, text: str | None = None, time_ms: int | None = None, *, stdin=None) -> TimedEntry:
    """Read a password without echo and time how long the entry took.

    When ``text`` is given (scripted mode) nothing is read; ``time_ms``
    defaults to 0, which the default time window rejects.
    """
    if text is not None:
        return TimedEntry(text, 0 if time_ms is None else int(time_ms))
    stdin = stdin or sys.stdin
    if not stdin.isatty():
        raise NoTerminal("no terminal available; pass --password (and --time-ms) instead")
    start = time.monotonic()
    entered = getpass.getpass(prompt)
    return TimedEntry(entered, max(0, round((time.monotonic() - start) * 1000)))


def exit_status(decision: GuardDecision) -> int:
    if decision.granted:
        return EXIT_OK
    if decision.intruder_declared or decision.failed_layer is Layer.TRAIL:
        return EXIT_LOCKED
    return EXIT_DENIED


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _time_window(value: str) -> tuple[int, int]:
    try:
        lo, hi = (int(v) for v in value.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected MIN,MAX in milliseconds") from None
    return lo, hi


def _seed(value: str) -> int:
    n = int(value, 0)
    if not 0 <= n <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="neuroauth", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("enroll", help="create a profile")
    e.add_argument("--profile", required=True, type=Path)
    e.add_argument("--two-passwords", action="store_true", help="provider and user passwords")
    e.add_argument("--eta", type=float, default=0.5)
    e.add_argument("--epsilon", type=float, default=1e-5)
    e.add_argument("--max-epochs", type=int, default=100_000)
    e.add_argument("--seed", type=_seed, default=0)
    e.add_argument("--lambda", dest="lam", type=float, default=1.0)
    e.add_argument("--max-trials", type=int, default=3)
    tw = e.add_mutually_exclusive_group()
    tw.add_argument("--time-window", type=_time_window, metavar="MIN,MAX")
    tw.add_argument("--no-time-layer", action="store_true")
    e.add_argument("--log-path", help="intrusion log (relative paths resolve next to the profile)")
    e.add_argument("--password", action="append", help="scripted resource password(s), role order")
    e.add_argument("--reset-password", help="scripted reset password")
    e.add_argument("--force", action="store_true", help="overwrite an existing profile")

    a = sub.add_parser("access", help="resource mode")
    a.add_argument("--profile", required=True, type=Path)
    a.add_argument("--password", action="append")
    a.add_argument("--time-ms", action="append", type=int)
    a.add_argument("--server", type=Path, help="server part file (two-factor mode)")
    a.add_argument("--token", type=Path, help="token file (two-factor mode)")

    r = sub.add_parser("reset", help="reset mode: re-encrypt or replace passwords")
    r.add_argument("--profile", required=True, type=Path)
    r.add_argument("--new-passwords", action="store_true")
    r.add_argument("--seed", type=_seed)
    r.add_argument("--password", action="append", help="current passwords: resource roles then reset")
    r.add_argument("--new-password", action="append")
    r.add_argument("--token", type=Path)

    lg = sub.add_parser("log", help="reset mode: show the intrusion log")
    lg.add_argument("--profile", required=True, type=Path)
    lg.add_argument("--password", action="append")
    lg.add_argument("--token", type=Path)

    x = sub.add_parser("export-token", help="split one template into token and server parts")
    x.add_argument("--profile", required=True, type=Path)
    x.add_argument("--which", required=True, choices=["provider", "user", "reset"])
    x.add_argument("--token-out", required=True, type=Path)
    x.add_argument("--server-out", required=True, type=Path)

    rep = sub.add_parser("replicate", help="rerun the two enrollment experiments to CSV")
    rep.add_argument("--out-dir", required=True, type=Path)
    return p


def _entries(labels, passwords, times=None, *, stdin=None) -> list[TimedEntry]:
    if passwords is not None:
        if len(passwords) != len(labels):
            raise UsageError(f"expected {len(labels)} --password values, got {len(passwords)}")
        times = list(times or [])
        if times and len(times) != len(passwords):
            raise UsageError("give one --time-ms per --password")
        return [prompt_with_timing("", pw, times[i] if times else None) for i, pw in enumerate(passwords)]
    return [prompt_with_timing(f"{label} password: ", stdin=stdin) for label in labels]


def _cmd_enroll(args, out, stdin) -> int:
    if args.profile.exists() and not args.force:
        raise UsageError(f"{args.profile} exists; use --force to overwrite")
    roles = vault.ROLES_TWO if args.two_passwords else vault.ROLES_ONE
    resource = [t.text for t in _entries(roles, args.password, stdin=stdin)]
    reset_pw = _entries(["reset"], None if args.reset_password is None else [args.reset_password], stdin=stdin)[0].text
    config = TrainingConfig(
        eta=args.eta, epsilon=args.epsilon, max_epochs=args.max_epochs, seed=args.seed, lam=args.lam
    )
    lo, hi = args.time_window or (50, 30_000)
    guard = GuardConfig(args.max_trials, lo, hi, not args.no_time_layer)
    log_path = args.log_path or f"{args.profile.name}.intrusions.log"
    profile = vault.create_profile(resource, reset_pw, config, guard, log_path)
    vault.save_profile(profile, args.profile)
    dims = ", ".join(
        f"{role} {s.architecture.input_count}/{s.architecture.hidden_count}/1 ({s.meta.epochs} epochs)"
        for role, s in zip(profile.roles, profile.slots)
    )
    print(f"enrolled {args.profile}: {dims}", file=out)
    return EXIT_OK


def _resource_templates(profile, server_path, token_path):
    split_roles = [r for r, s in zip(profile.resource_roles, profile.resource_templates)
                   if isinstance(s, vault.ServerPart)]
    if server_path is not None or token_path is not None:
        if len(split_roles) != 1:
            raise UsageError("two-factor mode needs exactly one exported resource template in the profile")
        if token_path is None:
            raise MissingToken("two-factor mode requires --token")
    elif split_roles:
        raise MissingToken(f"template {split_roles[0]!r} was exported; pass --token")
    templates = []
    for role, slot in zip(profile.resource_roles, profile.resource_templates):
        if isinstance(slot, vault.ServerPart):
            server = slot
            if server_path is not None:
                server = vault.load_server(server_path)
                if server.checksum != slot.checksum:
                    raise UsageError("server part does not belong to this profile")
            slot = vault.combine(vault.load_token(token_path), server)
        templates.append(slot)
    return templates


def _cmd_access(args, out, stdin) -> int:
    with vault.profile_lock(args.profile):
        profile = vault.load_profile(args.profile)
        templates = _resource_templates(profile, args.server, args.token)
        entries = _entries(profile.resource_roles, args.password, args.time_ms, stdin=stdin)
        decision, state, records = evaluate_attempt(
            profile.guard_state, profile.guard_config, templates,
            [e.text for e in entries], [e.insertion_ms for e in entries],
        )
        vault.append_log(profile.resolve_log_path(args.profile), records)
        if state != profile.guard_state:
            vault.save_profile(replace(profile, guard_state=state), args.profile)
    if decision.granted:
        print("access granted", file=out)
    elif decision.intruder_declared:
        print(f"access denied at {decision.failed_layer.value} layer: intruder declared", file=out)
    elif decision.failed_layer is Layer.TRAIL:
        print("access denied: profile locked, use reset mode", file=out)
    else:
        print(f"access denied at {decision.failed_layer.value} layer", file=out)
    return exit_status(decision)


def _tokens_for(profile, token_path):
    if token_path is None:
        return {}
    token = vault.load_token(token_path)
    return {r: token for r, s in zip(profile.roles, profile.slots) if isinstance(s, vault.ServerPart)}


def _cmd_reset(args, out, stdin) -> int:
    with vault.profile_lock(args.profile):
        profile = vault.load_profile(args.profile)
        current = [e.text for e in _entries(profile.roles, args.password, stdin=stdin)]
        new = None
        if args.new_passwords:
            new = [e.text for e in _entries([f"new {r}" for r in profile.roles], args.new_password, stdin=stdin)]
        elif args.new_password:
            raise UsageError("--new-password needs --new-passwords")
        kwargs = dict(provider_pw=current[0]) if len(current) == 3 else {}
        try:
            fresh = vault.reset_profile(
                profile, current[-2], current[-1],
                new_seed=args.seed if args.seed is not None else secrets.randbits(64),
                new_passwords=new, tokens=_tokens_for(profile, args.token),
                log_file=profile.resolve_log_path(args.profile), **kwargs,
            )
        except ResetDenied:
            print("reset denied", file=out)
            return EXIT_DENIED
        vault.save_profile(fresh, args.profile)
    print("reset complete: all templates re-encrypted, lock cleared", file=out)
    return EXIT_OK


def _cmd_log(args, out, stdin) -> int:
    profile = vault.load_profile(args.profile)
    log_file = profile.resolve_log_path(args.profile)
    passwords = [e.text for e in _entries(profile.roles, args.password, stdin=stdin)]
    try:
        vault.authenticate_reset(profile, passwords, tokens=_tokens_for(profile, args.token), log_file=log_file)
    except ResetDenied:
        print("reset denied", file=out)
        return EXIT_DENIED
    for rec in vault.read_log(log_file):
        print(vault.format_record(rec), file=out)
    return EXIT_OK


def _cmd_export(args, out, stdin) -> int:
    with vault.profile_lock(args.profile):
        profile = vault.load_profile(args.profile)
        if args.which not in profile.roles:
            raise UsageError(f"profile has no {args.which!r} template")
        slot = profile.slot(args.which)
        if isinstance(slot, vault.ServerPart):
            raise UsageError(f"{args.which!r} template was already exported")
        token, server = vault.split_two_factor(slot)
        vault.save_token(token, args.token_out)
        vault.save_server(server, args.server_out)
        vault.save_profile(profile.with_slot(args.which, server), args.profile)
    print(f"exported {args.which}: token -> {args.token_out}, server -> {args.server_out}", file=out)
    return EXIT_OK


def _cmd_replicate(args, out, stdin) -> int:
    for res in replicate_experiments(args.out_dir):
        a = res.template.architecture
        print(f"{res.experiment.name} '{res.experiment.password}': {a.input_count}/{a.hidden_count}/1, "
              f"{len(res.curve)} epochs, final error {res.curve.final_error:.3e}", file=out)
        for cand, o in res.outcomes.items():
            status = "authenticated" if o.authenticated else f"rejected ({o.rejected_stage.value})"
            detail = f", max diff {o.max_diff:.3e}" if o.diff_vector.size else ""
            print(f"  {cand:<14} {status}{detail}", file=out)
    print(f"wrote CSV files to {args.out_dir}", file=out)
    return EXIT_OK


_COMMANDS = {
    "enroll": _cmd_enroll,
    "access": _cmd_access,
    "reset": _cmd_reset,
    "log": _cmd_log,
    "export-token": _cmd_export,
    "replicate": _cmd_replicate,
}


def run_command(argv, *, stdout=None, stderr=None, stdin=None) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.command](args, out, stdin)
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_ERROR
    except UsageError as exc:
        print(f"neuroauth: error: {exc}", file=err)
        return EXIT_ERROR
    except (NeuroAuthError, OSError, ValueError) as exc:
        print(f"neuroauth: {type(exc).__name__}: {exc}", file=err)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
