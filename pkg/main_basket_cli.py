# =============================================================================
# MAIN_BASKET_CLI.PY - POINT D'ENTRÉE LIGNE DE COMMANDE
# =============================================================================
# Sous-commandes :
#   price          prix ũ (ACP) et/ou u_app, u_low, u_up (comonotone) au point S0
#   tables         reproduit une table de référence (1-4) et calcule les écarts
#   converge       erreur spatiale en fonction de m = N, pente log-log
#   temporal-study erreur temporelle EP vs IT à m fixé
#   oracle-check   contrôles d=1 (formule fermée, binomial) et Monte Carlo
#   spectrum       valeurs propres et classes des colonnes de Q
#
# Codes de sortie : 0 succès, 2 entrée invalide, 3 tolérance dépassée,
#                   1 erreur numérique.
# =============================================================================
from __future__ import annotations

import argparse
import logging
import sys

import pandas as pd

from src.bench import reports, runners
from src.errors import AssumptionViolation, BasketPricingError, ValidationError
from src.market.basket import ExerciseStyle
from src.market.config_file import load_config
from src.market.presets import get_preset
from src.pde.stepper import ConstraintMode
from src.settings import get_settings
from src.models.tracking import tracked_run

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_INVALID = 2
EXIT_TOLERANCE = 3

logger = logging.getLogger("basket_cli")


def parse_int_list(text: str) -> list[int]:
    """'20,30,40' ou 'début:fin:pas' (fin incluse)."""
    text = text.strip()
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        if len(parts) not in (2, 3):
            raise argparse.ArgumentTypeError(f"plage invalide : {text!r}")
        step = parts[2] if len(parts) == 3 else 1
        return list(range(parts[0], parts[1] + 1, step))
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"liste d'entiers invalide : {text!r}") from None


def build_parser(settings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="main_basket_cli.py",
        description="Pricing de puts européens et américains sur panier (ACP et comonotone).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument("--preset", help="A-F ou HL-T<T>-K<K>-s<σ1>")
    source.add_argument("--config", help="fichier de config clé = valeur")
    common.add_argument("--style", choices=[s.value for s in ExerciseStyle], default=None)
    common.add_argument("--method", choices=[m.value for m in runners.Method], default="both")
    common.add_argument("--mode", choices=["ep", "it"], default="it")
    common.add_argument("--m", type=int, default=settings.default_m)
    common.add_argument("--n", type=int, default=settings.default_n)
    common.add_argument("--out", default=None, help="chemin du CSV produit")
    common.add_argument("--seed", type=int, default=settings.seed)
    common.add_argument("--workers", type=int, default=settings.workers)

    p_price = sub.add_parser("price", parents=[common], help="prix au point S0")
    p_price.add_argument("--rate", type=float, default=None)

    p_tables = sub.add_parser("tables", parents=[common], help="tables de référence")
    p_tables.add_argument("--which", type=int, choices=[1, 2, 3, 4], required=True)
    p_tables.add_argument("--rate", type=float, default=None)
    p_tables.add_argument("--check", action="store_true", help="code 3 si une ligne sort de la tolérance")

    p_conv = sub.add_parser("converge", parents=[common], help="convergence spatiale (N = m)")
    p_conv.add_argument("--m-list", type=parse_int_list, default=list(range(20, 101, 10)))
    p_conv.add_argument("--reference-m", type=int, default=runners.REFERENCE_M)

    p_temp = sub.add_parser("temporal-study", parents=[common], help="erreur temporelle EP vs IT")
    p_temp.add_argument("--n-list", type=parse_int_list, default=list(range(10, 101, 10)))
    p_temp.add_argument("--reference-n", type=int, default=runners.REFERENCE_N)

    p_oracle = sub.add_parser("oracle-check", parents=[common], help="contrôles par oracles")
    p_oracle.add_argument("--paths", type=int, default=settings.mc_paths)
    p_oracle.add_argument("--crr-steps", type=int, default=runners.CRR_STEPS)

    sub.add_parser("spectrum", parents=[common], help="spectre de la covariance")
    return parser


def load_run_config(args) -> runners.RunConfig:
    if args.config:
        spec = load_config(args.config)
        label, is_preset = args.config, False
    else:
        label = args.preset or "A"
        spec, is_preset = get_preset(label), True
    if args.style:
        spec = spec.with_style(args.style)
    if getattr(args, "rate", None) is not None:
        spec = spec.with_rate(args.rate)
        is_preset = False
    if args.m < 3 or args.n < 1:
        raise ValidationError(f"m >= 3 et N >= 1 requis (m={args.m}, N={args.n})")
    return runners.RunConfig(
        spec=spec,
        label=label,
        method=runners.Method(args.method),
        mode=ConstraintMode(args.mode),
        m=args.m,
        n_steps=args.n,
        workers=args.workers,
        seed=args.seed,
        is_preset=is_preset,
    )


def _table_checks_pass(df: pd.DataFrame) -> bool:
    """Tolérances de référence et monotonie en K, quand ces colonnes existent."""
    return all(df[col].all() for col in ("passed", "monotone_in_K") if col in df)


def run(args, settings) -> int:
    command = args.command
    out = args.out

    if command == "tables":
        label = f"table{args.which}"
        params = {"which": args.which, "m": args.m, "N": args.n}
        with tracked_run(settings, command, label, params) as tracker:
            df = runners.tables(args.which, args.m, args.n, args.workers, args.rate)
            path = reports.write_csv(df, out or reports.default_output(settings.output_dir, command, label))
            tracker.log_artifact(str(path))
            if "passed" in df:
                tracker.log_metrics({"rows_passed": int(df["passed"].sum()), "rows": len(df)})
            if "monotone_in_K" in df:
                tracker.log_metrics({"rows_monotone_in_K": int(df["monotone_in_K"].sum())})
            if args.check and not _table_checks_pass(df):
                return EXIT_TOLERANCE
        return EXIT_OK

    cfg = load_run_config(args)
    params = {
        "preset": cfg.label,
        "style": cfg.spec.style.value,
        "method": cfg.method.value,
        "mode": cfg.mode.value,
        "m": cfg.m,
        "N": cfg.n_steps,
    }
    with tracked_run(settings, command, cfg.label, params) as tracker:
        default_out = reports.default_output(settings.output_dir, command, cfg.label)

        if command == "price":
            record = runners.price(cfg)
            print(f"💰 {cfg.label}\n{reports.format_record(record)}")
            tracker.log_metrics({k: v for k, v in record.items() if isinstance(v, float)})
            if out:
                # CSV sans la durée d'exécution
                row = {k: v for k, v in record.items() if k != "seconds"}
                tracker.log_artifact(str(reports.write_csv(pd.DataFrame([row]), out)))
            return EXIT_OK

        if command == "converge":
            df, slopes = runners.converge(cfg, args.m_list, args.reference_m)
            tracker.log_metrics({f"slope_{k}": v for k, v in slopes.items()})
        elif command == "temporal-study":
            df, orders = runners.temporal_study(cfg, args.n_list, args.reference_n)
            tracker.log_metrics({f"order_{k}": v for k, v in orders.items()})
        elif command == "oracle-check":
            df = runners.oracle_check(cfg, args.paths, args.crr_steps)
            tracker.log_metrics({row.check: row.deviation for row in df.itertuples()})
        else:
            df = runners.spectrum_report(cfg.spec)
            print(df.to_string(index=False))

        path = reports.write_csv(df, out or default_out)
        tracker.log_artifact(str(path))
        if command == "oracle-check" and not df["passed"].all():
            return EXIT_TOLERANCE
    return EXIT_OK


def main(argv=None) -> int:
    settings = get_settings()
    logging.basicConfig(level=settings.log_level, format='%(asctime)s - %(levelname)s - %(message)s')
    args = build_parser(settings).parse_args(argv)
    try:
        code = run(args, settings)
    except (ValidationError, AssumptionViolation) as e:
        logger.error(f"❌ Entrée invalide : {e}")
        return EXIT_INVALID
    except BasketPricingError as e:
        logger.error(f"❌ Erreur numérique : {e}")
        return EXIT_NUMERICAL
    if code == EXIT_TOLERANCE:
        logger.error("❌ Tolérance dépassée")
    else:
        logger.info("✅ Terminé")
    return code


if __name__ == "__main__":
    sys.exit(main())
