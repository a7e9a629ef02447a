import sys

from rich.console import Console
from app.cli.cli import app
from app.utils.errors import BoundViolation, ConfigError, ConfigFileNotFound, QuadratureError


def main():
    console = Console()
    try:
        app()
    except (ConfigError, ConfigFileNotFound) as e:
        console.print(f"[red]Ошибка конфигурации:[/red] {e}")
        sys.exit(2)
    except BoundViolation as e:
        console.print(f"[red]Нарушена оценка:[/red] {e}")
        sys.exit(1)
    except QuadratureError as e:
        console.print(f"[red]Ошибка квадратуры:[/red] {e}")
        sys.exit(1)
    except Exception as e:
        console.print(f"[bold red]Непредвиденная ошибка:[/bold red] {e}", style="red")
        sys.exit(1)


if __name__ == "__main__":
    main()
