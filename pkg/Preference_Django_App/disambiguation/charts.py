import pandas as pd
import plotly.graph_objects as go

from .train import HillClimbStep


def factor_set_comparison_chart(frame: pd.DataFrame, title: str = 'Scaling factor sets') -> go.Figure:
    """Bar chart of a comparison_frame: percentage correct per factor set."""
    if 'Percentage correct' not in frame.columns:
        raise ValueError("DataFrame must contain a 'Percentage correct' column")

    fig = go.Figure()
    fig.add_trace(go.Bar(
        x=frame['Scaling factor set'],
        y=frame['Percentage correct'],
        marker=dict(color='rgba(53, 92, 125, 0.85)', line=dict(color='rgba(255, 255, 255, 0.5)', width=1)),
        text=[f"{p:.1f}%" for p in frame['Percentage correct']],
        textposition='outside',
        hovertext=[
            f"<b>{name}</b><br>Correct: <b>{n}</b><br>Percentage: <b>{p:.1f}%</b>"
            for name, n, p in zip(frame['Scaling factor set'], frame['Number correct'], frame['Percentage correct'])
        ],
        hoverinfo='text',
        showlegend=False,
    ))
    fig.update_layout(
        title={'text': f"<b>{title}</b>", 'x': 0.5, 'xanchor': 'center',
               'font': {'size': 20, 'color': '#2c3e50', 'family': 'Arial'}},
        xaxis={'title': {'text': 'Scaling factor set'}},
        yaxis={'title': {'text': 'Percentage correct'}, 'range': [0, 105], 'gridcolor': '#ecf0f1'},
        plot_bgcolor='white',
    )
    return fig


def hill_climb_trajectory_chart(steps, initial_correct: int, n_sentences: int,
                                title: str = 'Hill climbing') -> go.Figure:
    """Correct count after each accepted alteration, labelled with the function changed."""
    steps = list(steps)
    x = [0] + [s.iteration for s in steps]
    y = [initial_correct] + [s.correct for s in steps]
    labels = ['start'] + [f"{s.function}: {s.old_value:.4g} → {s.new_value:.4g}" for s in steps]

    fig = go.Figure()
    fig.add_trace(go.Scatter(
        x=x,
        y=y,
        mode='lines+markers',
        line=dict(color='#2ecc71', width=2),
        marker=dict(size=7),
        hovertext=labels,
        hoverinfo='text+y',
        name='Correct',
    ))
    fig.update_layout(
        title={'text': f"<b>{title}</b>", 'x': 0.5, 'xanchor': 'center',
               'font': {'size': 20, 'color': '#2c3e50', 'family': 'Arial'}},
        xaxis={'title': {'text': 'Iteration'}},
        yaxis={'title': {'text': f'Sentences correct (of {n_sentences})'}, 'gridcolor': '#ecf0f1'},
        plot_bgcolor='white',
    )
    return fig


def write_html(fig: go.Figure, path) -> None:
    fig.write_html(str(path), include_plotlyjs='cdn', full_html=True)
