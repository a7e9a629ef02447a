from app.main import main


def run() -> None:
    """Входная точка команды run: константы, оценки и исследования."""
    main()
